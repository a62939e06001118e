//! LSH: a line-oriented history format.
//!
//! ```text
//! # comment
//! snapshot 4 Ujoe class="user" team="team1"
//! event 4 req_4 Ujoe -> P57 name="request"
//! ```
//!
//! `id` (and `time` for events) are implicit. Giving them explicitly is
//! allowed only with the implied value.

use crate::lang::parse_literal;
use crate::value::{is_valid_name, AttrSet, Value};

use super::{HistoryError, ObjectSnapshot, SystemEvent, SystemHistory, Time};

/// One LSH line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Record {
    Snapshot(ObjectSnapshot),
    Event(SystemEvent),
}

impl Record {
    pub fn time(&self) -> Time {
        match self {
            Record::Snapshot(s) => s.time,
            Record::Event(e) => e.time,
        }
    }
}

/// Parses LSH text and validates the result.
pub fn parse_history(text: &str) -> Result<SystemHistory, HistoryError> {
    let mut h = SystemHistory::new();
    for (i, line) in text.lines().enumerate() {
        match parse_record(line).map_err(|message| HistoryError::Parse { line: i + 1, message })? {
            Some(Record::Snapshot(s)) => h.add_snapshot(s),
            Some(Record::Event(e)) => h.add_event(e),
            None => {}
        }
    }
    h.validate()?;
    Ok(h)
}

/// Parses one line; blank lines and comments give `None`.
pub fn parse_record(line: &str) -> Result<Option<Record>, String> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let toks = split_fields(line)?;
    let kind = toks[0];
    let time: Time = toks
        .get(1)
        .ok_or("missing time")?
        .parse()
        .map_err(|_| format!("bad time '{}'", toks[1]))?;
    match kind {
        "snapshot" => {
            let obj = object_id(toks.get(2).copied())?;
            let mut attrs = attributes(&toks[3..])?;
            check_implicit(&mut attrs, "id", &Value::str(obj))?;
            check_implicit(&mut attrs, "time", &Value::int(time))?;
            Ok(Some(Record::Snapshot(ObjectSnapshot::new(obj, time, attrs))))
        }
        "event" => {
            let id = object_id(toks.get(2).copied())?;
            let src = object_id(toks.get(3).copied())?;
            if toks.get(4) != Some(&"->") {
                return Err("expected '->' between source and destination".into());
            }
            let dst = object_id(toks.get(5).copied())?;
            let mut attrs = attributes(&toks[6.min(toks.len())..])?;
            check_implicit(&mut attrs, "id", &Value::str(id))?;
            check_implicit(&mut attrs, "time", &Value::int(time))?;
            Ok(Some(Record::Event(SystemEvent::new(id, src, dst, time, attrs))))
        }
        other => Err(format!("unknown record kind '{other}'")),
    }
}

fn object_id(tok: Option<&str>) -> Result<&str, String> {
    let tok = tok.ok_or("missing identifier")?;
    let ok = tok != "->" && !tok.chars().any(|c| matches!(c, '"' | '=' | '{' | '}' | ','));
    if ok {
        Ok(tok)
    } else {
        Err(format!("bad identifier '{tok}'"))
    }
}

fn attributes(toks: &[&str]) -> Result<AttrSet, String> {
    let mut out = AttrSet::new();
    for tok in toks {
        let (name, value) = tok
            .split_once('=')
            .ok_or_else(|| format!("expected attr=value, got '{tok}'"))?;
        if !is_valid_name(name) {
            return Err(format!("bad attribute name '{name}'"));
        }
        let v = parse_literal(value).map_err(|e| format!("bad value for '{name}': {e}"))?;
        if out.insert(name.to_string(), v).is_some() {
            return Err(format!("attribute '{name}' given twice"));
        }
    }
    Ok(out)
}

fn check_implicit(attrs: &mut AttrSet, name: &str, want: &Value) -> Result<(), String> {
    match attrs.remove(name) {
        Some(v) if v != *want => Err(format!("explicit {name}={v} conflicts with implied {want}")),
        _ => Ok(()),
    }
}

/// Splits on whitespace outside double quotes and braces.
fn split_fields(line: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut start = None;
    let (mut in_str, mut depth) = (false, 0usize);
    for (i, c) in line.char_indices() {
        if in_str {
            in_str = c != '"';
            continue;
        }
        match c {
            '"' => in_str = true,
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            c if c.is_whitespace() && depth == 0 => {
                if let Some(s) = start.take() {
                    out.push(&line[s..i]);
                }
                continue;
            }
            _ => {}
        }
        start.get_or_insert(i);
    }
    if in_str {
        return Err("unterminated string".into());
    }
    if let Some(s) = start {
        out.push(&line[s..]);
    }
    Ok(out)
}

/// Renders a value for LSH: like predicate literals but with no spaces
/// inside sets.
pub fn render_value(v: &Value) -> String {
    match v {
        Value::Set(items) => {
            let inner: Vec<_> = items.iter().map(render_value).collect();
            format!("{{{}}}", inner.join(","))
        }
        other => other.to_string(),
    }
}

fn render_attrs(out: &mut String, attrs: &AttrSet, skip: &[&str]) {
    for (k, v) in attrs {
        if !skip.contains(&k.as_str()) {
            out.push_str(&format!(" {k}={}", render_value(v)));
        }
    }
}

pub fn render_record(r: &Record) -> String {
    let mut out = String::new();
    match r {
        Record::Snapshot(s) => {
            out.push_str(&format!("snapshot {} {}", s.time, s.object));
            render_attrs(&mut out, &s.attrs, &["id"]);
        }
        Record::Event(e) => {
            out.push_str(&format!("event {} {} {} -> {}", e.time, e.id, e.src, e.dst));
            render_attrs(&mut out, &e.attrs, &["id", "time"]);
        }
    }
    out
}

/// Renders a history in time order, snapshots before events at each time.
pub fn render_history(h: &SystemHistory) -> String {
    let mut out = String::new();
    for (_, inst) in h.instances() {
        for s in &inst.snapshots {
            out.push_str(&render_record(&Record::Snapshot(s.clone())));
            out.push('\n');
        }
        for e in &inst.events {
            out.push_str(&render_record(&Record::Event(e.clone())));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const H1: &str = "\
snapshot 4 Ujoe class=\"user\" name=\"joe\" team=\"team1\"
snapshot 4 Uchris class=\"user\" name=\"chris\" team=\"team2\"
snapshot 4 P57 class=\"purchase\" amount=1200
event 4 req_4 Ujoe -> P57 name=\"request\"
snapshot 38 Uchris team=\"team1\"
snapshot 38 Ujoe office=\"B12\"
snapshot 40 P57 state=\"approved\"
event 40 appr_40 Uchris -> P57 name=\"approve\"
";

    #[test]
    fn parses_fixture() {
        let h = parse_history(H1).unwrap();
        assert_eq!(h.instance_count(), 3);
        assert_eq!(h.events().count(), 2);
        let req = h.events().next().unwrap();
        assert_eq!(req.attrs["time"], Value::int(4));
        assert_eq!(req.attrs["id"], Value::str("req_4"));
        assert_eq!(req.attrs["name"], Value::str("request"));
    }

    #[test]
    fn empty_and_comments() {
        assert!(parse_history("").unwrap().is_empty());
        assert!(parse_history("# nothing\n\n").unwrap().is_empty());
        let h = parse_history("snapshot 1 a").unwrap();
        assert_eq!(h.instance_count(), 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_history("event 1 e a -> b"),
            Err(HistoryError::UnknownEndpoint { .. })
        ));
        assert!(matches!(
            parse_history("snapshot 2 a\nevent 1 e a -> a"),
            Err(HistoryError::UnknownEndpoint { .. })
        ));
        assert!(matches!(
            parse_history("snapshot 1 a\nevent 1 e a -> a\nevent 2 e a -> a"),
            Err(HistoryError::DuplicateEvent(_))
        ));
        assert!(matches!(
            parse_history("snapshot 1 a x=\"open"),
            Err(HistoryError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_history("snapshot 1 a x=bare"),
            Err(HistoryError::Parse { .. })
        ));
        assert!(matches!(
            parse_history("snapshot 1 a id=\"b\""),
            Err(HistoryError::Parse { .. })
        ));
        assert!(matches!(
            parse_history("snapshot 1 a\nevent 1 e a -> a time=2"),
            Err(HistoryError::Parse { line: 2, .. })
        ));
        assert!(parse_history("snapshot 1 a id=\"a\" time=1").is_ok());
        assert!(matches!(parse_history("snapshot x a"), Err(HistoryError::Parse { .. })));
        assert!(matches!(parse_history("snap 1 a"), Err(HistoryError::Parse { .. })));
    }

    #[test]
    fn unordered_lines_are_fine() {
        let h = parse_history("event 5 e a -> a\nsnapshot 1 a").unwrap();
        assert_eq!(h.instances().map(|(t, _)| t).collect::<Vec<_>>(), vec![1, 5]);
    }

    #[test]
    fn values_with_spaces_and_sets() {
        let h = parse_history("snapshot 1 a s={\"x y\", 2} t=\"p q\" b=true n=-1.5").unwrap();
        let s = h.snapshots().next().unwrap();
        assert_eq!(s.attrs["s"], Value::set([Value::str("x y"), Value::int(2)]).unwrap());
        assert_eq!(s.attrs["t"], Value::str("p q"));
        assert_eq!(s.attrs["b"], Value::Bool(true));
        let back = parse_history(&render_history(&h)).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn round_trip() {
        let h = parse_history(H1).unwrap();
        assert_eq!(parse_history(&render_history(&h)).unwrap(), h);
    }
}
