// SPDX-License-Identifier: MIT OR Apache-2.0

//! A tiny pass/fail report for criteria with time limits.

#![forbid(unsafe_code)]

use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl Line {
    pub fn render(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let limit = self
            .limit
            .map(|l| format!(", limit {}s", l.as_secs()))
            .unwrap_or_default();
        format!(
            "{status} {:<26} {:>7.2}s{limit}  {}",
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<Line>,
}

impl Report {
    /// Runs `check`, times it and prints its line straight away. `Ok` holds a
    /// summary, `Err` the reason for failure. Going over `limit` fails the line.
    pub fn run(
        &mut self,
        name: &str,
        limit: Option<Duration>,
        check: impl FnOnce() -> Result<String, String>,
    ) -> &Line {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let over = limit.is_some_and(|l| elapsed > l);
        let (passed, mut detail) = match outcome {
            Ok(d) => (!over, d),
            Err(d) => (false, d),
        };
        if over {
            detail.push_str(" (over time limit)");
        }
        let line = Line {
            name: name.into(),
            passed,
            detail,
            elapsed,
            limit,
        };
        println!("{}", line.render());
        self.lines.push(line);
        self.lines.last().expect("just pushed")
    }

    pub fn failed(&self) -> usize {
        self.lines.iter().filter(|l| !l.passed).count()
    }

    pub fn summary(&self) -> String {
        format!(
            "acceptance: {} passed, {} failed",
            self.lines.len() - self.failed(),
            self.failed()
        )
    }
}
