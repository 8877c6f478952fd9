//! Decoding of command arguments that name a web, a profile or a point.

use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;

use webmod::evaluation::GrassPoint;
use webmod::profiles::Rank2Profile;
use webmod::webs::Web;

/// `-` reads stdin, an existing path reads the file, anything else is taken
/// literally.
pub fn read_arg(arg: &str) -> Result<String> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        return Ok(s);
    }
    let path = Path::new(arg);
    if !arg.trim_start().starts_with('{') && path.is_file() {
        return std::fs::read_to_string(path).with_context(|| format!("reading {arg}"));
    }
    Ok(arg.to_string())
}

pub enum Object {
    Web(Web),
    Profile(Rank2Profile),
}

/// A web JSON object, a profile JSON object `{"n","top","bottom"}`, or a
/// compact profile word over `U D < >`.
pub fn parse_object(text: &str) -> Result<Object> {
    let text = text.trim();
    if !text.starts_with('{') {
        let p = Rank2Profile::parse_compact(text)
            .with_context(|| format!("{text:?} is neither JSON nor a profile word"))?;
        return Ok(Object::Profile(p));
    }
    let v: Value = serde_json::from_str(text).context("malformed JSON")?;
    if v.get("kind").is_some() {
        return Ok(Object::Web(Web::from_json(text)?));
    }
    if v.get("top").is_some() {
        return Ok(Object::Profile(serde_json::from_value(v)?));
    }
    if let Some(p) = v.get("profile") {
        return Ok(Object::Profile(serde_json::from_value(p.clone())?));
    }
    bail!("JSON object is neither a web (\"kind\") nor a profile (\"top\")")
}

pub fn parse_web(text: &str) -> Result<Web> {
    match parse_object(text)? {
        Object::Web(w) => Ok(w),
        Object::Profile(_) => bail!("expected a web, got a profile"),
    }
}

pub fn parse_profile(text: &str) -> Result<Rank2Profile> {
    match parse_object(text)? {
        Object::Profile(p) => Ok(p),
        Object::Web(_) => bail!("expected a profile, got a web"),
    }
}

pub fn parse_point(text: &str) -> Result<GrassPoint> {
    Ok(GrassPoint::parse_tsv(text)?)
}

/// `"5,4,4,1"` into integers.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .with_context(|| format!("{x:?} is not a nonnegative integer"))
        })
        .collect()
}
