//! Output files stamped with the command, its configuration and the code version.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hierarg::field_grid::fmt17;
use serde::Serialize;
use serde_json::Value;

pub struct Output {
    dir: PathBuf,
    plot: bool,
}

pub struct Header {
    command: &'static str,
    config: Value,
}

impl Header {
    fn comment_lines(&self) -> String {
        format!(
            "# hierarg {}\n# command: {}\n# config: {}\n",
            hierarg::VERSION,
            self.command,
            self.config
        )
    }

    /// CSV body preceded by `#` comment lines.
    pub fn csv(&self, body: &str) -> String {
        self.comment_lines() + body
    }

    /// `version`, `command` and `config` merged into the top-level object `body`.
    pub fn json(&self, body: Value) -> String {
        let mut map = serde_json::Map::new();
        map.insert("version".into(), Value::from(hierarg::VERSION));
        map.insert("command".into(), Value::from(self.command));
        map.insert("config".into(), self.config.clone());
        if let Value::Object(fields) = body {
            map.extend(fields);
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

impl Output {
    pub fn new(dir: &Path, plot: bool) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output { dir: dir.to_path_buf(), plot })
    }

    pub fn header(&self, command: &'static str, config: &impl Serialize) -> Header {
        Header {
            command,
            config: serde_json::to_value(config).expect("configs serialize"),
        }
    }

    pub fn write(&self, name: &str, contents: &str) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
    }

    /// Two whitespace-separated columns, written only with `--plot-data`.
    pub fn plot(&self, name: &str, header: &Header, columns: &str, pts: &[(f64, f64)]) -> anyhow::Result<()> {
        self.plot_blocks(name, header, columns, std::slice::from_ref(&pts.to_vec()))
    }

    /// Like [`Output::plot`] with blocks separated by two blank lines (gnuplot `index`).
    pub fn plot_blocks(
        &self,
        name: &str,
        header: &Header,
        columns: &str,
        blocks: &[Vec<(f64, f64)>],
    ) -> anyhow::Result<()> {
        if !self.plot {
            return Ok(());
        }
        let mut s = header.comment_lines();
        s.push_str(&format!("# {columns}\n"));
        for (i, block) in blocks.iter().enumerate() {
            if i > 0 {
                s.push_str("\n\n");
            }
            for (a, b) in block {
                s.push_str(&format!("{} {}\n", fmt17(*a), fmt17(*b)));
            }
        }
        self.write(name, &s)
    }
}
