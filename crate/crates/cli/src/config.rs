//! Flat `key=value` config files merged into the argument list.

use std::fs;

/// Location of `--config PATH` or `--config=PATH` in raw arguments.
fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn has_flag(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let eq = format!("--{key}=");
    args.iter().any(|a| *a == flag || a.starts_with(&eq))
}

/// Parse `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Append config entries not already given on the command line.
pub fn merge(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut merged = args.clone();
    for (k, v) in parse(&text)? {
        if k == "config" || has_flag(&args, &k) {
            continue;
        }
        match v.as_str() {
            "true" => merged.push(format!("--{k}")),
            "false" => {}
            _ => {
                merged.push(format!("--{k}"));
                merged.push(v);
            }
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        fs::write(&p, "# run\nk = 2\nL=4\nverify-ed=true\nthreads=false\n").unwrap();
        let args: Vec<String> = [
            "ffcomm",
            "dims",
            "--k",
            "1",
            "--config",
            p.to_str().unwrap(),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let m = merge(args).unwrap();
        assert_eq!(&m[6..], &["--L", "4", "--verify-ed"]);
    }

    #[test]
    fn malformed_line() {
        assert!(parse("k 2").is_err());
    }
}
