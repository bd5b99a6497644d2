#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;

use abc_shadow_cli::{run, Cli, RunReport};
use clap::Parser;

pub type Row = HashMap<String, String>;

pub fn cli(args: &[&str]) -> Result<RunReport, abc_shadow_cli::error::CliError> {
    let cli = Cli::try_parse_from(std::iter::once("abc-shadow").chain(args.iter().copied()))
        .unwrap_or_else(|e| panic!("bad test arguments {args:?}: {e}"));
    run(&cli.command)
}

pub fn read_csv(path: &Path) -> Vec<Row> {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    lines
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            assert_eq!(cells.len(), header.len(), "ragged row {l:?} in {}", path.display());
            header.iter().cloned().zip(cells.into_iter().map(str::to_string)).collect()
        })
        .collect()
}

pub fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap_or("").to_string()
}

pub fn find<'a>(rows: &'a [Row], pairs: &[(&str, &str)]) -> &'a Row {
    rows.iter()
        .find(|r| pairs.iter().all(|(k, v)| r.get(*k).map(String::as_str) == Some(*v)))
        .unwrap_or_else(|| panic!("no row with {pairs:?}"))
}

pub fn num(row: &Row, col: &str) -> f64 {
    row[col].parse().unwrap_or_else(|_| panic!("column {col} is not a number: {:?}", row[col]))
}
