use std::fs;
use std::io::{self, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::{Format, RunConfig};

/// One named artifact of a command.
pub struct Output {
    pub name: String,
    pub body: String,
    /// CSV body that `--format json` turns into an array of records
    pub tabular: bool,
}

impl Output {
    pub fn json(name: &str, body: String) -> Self {
        Self {
            name: name.into(),
            body,
            tabular: false,
        }
    }

    pub fn csv(name: &str, body: String) -> Self {
        Self {
            name: name.into(),
            body,
            tabular: true,
        }
    }

    pub fn svg(name: &str, body: String) -> Self {
        Self::json(name, body)
    }

    fn rendered(&self, format: Format) -> (String, String) {
        if !self.tabular || format == Format::Csv {
            return (self.name.clone(), self.body.clone());
        }
        let stem = self.name.strip_suffix(".csv").unwrap_or(&self.name);
        (format!("{stem}.json"), csv_to_json(&self.body))
    }
}

/// Records keyed by the header row; every value stays a string.
pub fn csv_to_json(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let rows: Vec<serde_json::Value> = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let map = header
                .iter()
                .zip(l.split(','))
                .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
                .collect();
            serde_json::Value::Object(map)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("strings serialize");
    s.push('\n');
    s
}

/// Temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, body: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(body)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn emit(cfg: &RunConfig, outputs: &[Output]) -> io::Result<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    for o in outputs {
        let (name, body) = o.rendered(cfg.format);
        if cfg.stdout {
            if outputs.len() > 1 {
                writeln!(lock, "# {name}")?;
            }
            lock.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                writeln!(lock)?;
            }
        } else {
            let path = cfg.out_dir.join(&name);
            write_atomic(&path, body.as_bytes())?;
            writeln!(lock, "{}", path.display())?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_records() {
        let j = csv_to_json("k,v\n1,2.5\n2,-3e-4\n");
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v[1]["v"], "-3e-4");
        assert_eq!(v.as_array().unwrap().len(), 2);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
