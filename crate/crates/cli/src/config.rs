//! `key = value` config files. Each entry becomes a `--key value` flag
//! placed before the command-line flags, so explicit flags win.

use std::collections::BTreeSet;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// `_` in keys is read as `-`.
pub fn parse(text: &str) -> Result<Vec<ConfigEntry>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: invalid key '{}'", i + 1, k.trim()));
        }
        out.push(ConfigEntry {
            key,
            value: v.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<Vec<ConfigEntry>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse(&text)
}

/// Removes `--config PATH` or `--config=PATH` from `args`, returning the path.
pub fn take_config_flag(args: &mut Vec<String>) -> Result<Option<String>, String> {
    let mut found = None;
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a path".into());
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(p) = args[i].strip_prefix("--config=") {
            found = Some(p.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Splices config entries into `args` right after the subcommand. Keys the
/// subcommand does not take are skipped; keys no subcommand takes are errors.
pub fn splice(
    args: &mut Vec<String>,
    entries: &[ConfigEntry],
    subcommand_at: Option<usize>,
    accepted: &BTreeSet<String>,
    known: &BTreeSet<String>,
) -> Result<(), String> {
    let mut injected = Vec::new();
    for e in entries {
        if !known.contains(&e.key) {
            return Err(format!("config line {}: unknown key '{}'", e.line, e.key));
        }
        if accepted.contains(&e.key) {
            injected.push(format!("--{}={}", e.key, e.value));
        }
    }
    let at = subcommand_at.map_or(args.len(), |i| i + 1);
    args.splice(at..at, injected);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let e = parse("# header\nstop_gap = 1e-4\n\nfamily=whitham # trailing\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].key, "stop-gap");
        assert_eq!(e[0].value, "1e-4");
        assert_eq!(e[1].value, "whitham");
        assert_eq!(e[1].line, 4);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse("modes 64\n").is_err());
        assert!(parse("= 3\n").is_err());
        assert!(parse("config = other.conf\n").is_err());
    }

    #[test]
    fn extracts_config_flag() {
        let mut a: Vec<String> = ["bin", "solve", "--config", "c.txt", "--modes", "8"].map(String::from).to_vec();
        assert_eq!(take_config_flag(&mut a).unwrap().as_deref(), Some("c.txt"));
        assert_eq!(a, ["bin", "solve", "--modes", "8"]);
        let mut b: Vec<String> = ["bin", "--config=x", "solve"].map(String::from).to_vec();
        assert_eq!(take_config_flag(&mut b).unwrap().as_deref(), Some("x"));
        let mut c: Vec<String> = ["bin", "--config"].map(String::from).to_vec();
        assert!(take_config_flag(&mut c).is_err());
    }

    #[test]
    fn flags_after_config_entries() {
        let entries = parse("modes = 64\nfamily = bidirectional\n").unwrap();
        let accepted: BTreeSet<String> = ["modes".to_string()].into();
        let known: BTreeSet<String> = ["modes".to_string(), "family".to_string()].into();
        let mut a: Vec<String> = ["bin", "identities", "--modes", "8"].map(String::from).to_vec();
        splice(&mut a, &entries, Some(1), &accepted, &known).unwrap();
        assert_eq!(a, ["bin", "identities", "--modes=64", "--modes", "8"]);
        let bad = parse("bogus = 1\n").unwrap();
        assert!(splice(&mut a, &bad, Some(1), &accepted, &known).is_err());
    }
}
