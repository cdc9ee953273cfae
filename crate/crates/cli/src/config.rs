//! `--config FILE` support.
//!
//! The file holds `key = value` lines mirroring long flags (`p01 = 1e-3`,
//! `tail-tol = 1e-12`). Blank lines and `#` comments are ignored. The
//! entries are spliced into the argument list right after the subcommand,
//! ahead of the user's own flags, so explicit flags win.

use std::path::Path;

pub const SUBCOMMANDS: &[&str] = &["roc", "phimin", "sweep", "beta-scan", "simulate"];

pub fn parse_config(text: &str, origin: &str) -> Result<Vec<String>, String> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{origin}:{}: expected `key = value`", i + 1))?;
        let key = key.trim().trim_start_matches('-');
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(format!("{origin}:{}: bad key `{key}`", i + 1));
        }
        if key == "config" {
            return Err(format!("{origin}:{}: config files cannot nest", i + 1));
        }
        args.push(format!("--{key}"));
        args.push(value.trim().to_string());
    }
    Ok(args)
}

/// Returns `argv` with any `--config FILE` removed and the file's entries
/// inserted after the subcommand name.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config: Option<String> = None;
    let mut it = argv.into_iter();
    if let Some(bin) = it.next() {
        rest.push(bin);
    }
    while let Some(arg) = it.next() {
        if arg == "--config" {
            let path = it.next().ok_or("--config needs a file path")?;
            config = Some(path);
        } else if let Some(path) = arg.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config {path}: {e}"))?;
    let extra = parse_config(&text, &path)?;
    let at = rest
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .map_or(rest.len(), |i| i + 1);
    rest.splice(at..at, extra);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let args = parse_config("# defaults\np01 = 1e-3\n\n--tail-tol=1e-10 # tighter\n", "f").unwrap();
        assert_eq!(args, vec!["--p01", "1e-3", "--tail-tol", "1e-10"]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_config("p01 1e-3", "f").is_err());
        assert!(parse_config("config = other", "f").is_err());
        assert!(parse_config("a b = 1", "f").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "p01 = 0.1\n").unwrap();
        let argv = ["bin", "--format", "json", "phimin", "--config", path.to_str().unwrap(), "--p01", "0"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let out = expand_config(argv).unwrap();
        assert_eq!(out, vec!["bin", "--format", "json", "phimin", "--p01", "0.1", "--p01", "0"]);
    }
}
