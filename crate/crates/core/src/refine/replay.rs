//! Violation replay files: program source, call, scheduler bits, and
//! observation mode in one self-contained text file.

use super::similar::Observation;
use crate::lang::*;

#[derive(Debug, Clone)]
pub struct Replay {
    pub source: Program,
    pub target: Program,
    pub fn_name: String,
    pub arg: Expr,
    pub bits: Vec<bool>,
    pub obs: Observation,
}

pub fn write_replay(r: &Replay) -> String {
    let bits: String = r.bits.iter().map(|b| if *b { '1' } else { '0' }).collect();
    let obs = match r.obs {
        Observation::Shallow => "shallow",
        Observation::Deep => "deep",
    };
    format!(
        "# tmc-forge replay\n\
         obs: {obs}\n\
         fn: {}\n\
         arg: {}\n\
         bits: {bits}\n\
         --- source ---\n{}\
         --- target ---\n{}",
        r.fn_name,
        print_expr(&r.arg).replace('\n', " "),
        print_program(&r.source),
        print_program(&r.target),
    )
}

pub fn read_replay(text: &str) -> Result<Replay, String> {
    let mut obs = Observation::Deep;
    let mut fn_name = None;
    let mut arg = None;
    let mut bits = Vec::new();
    let mut source_text = String::new();
    let mut target_text = String::new();
    #[derive(PartialEq)]
    enum Section {
        Header,
        Source,
        Target,
    }
    let mut section = Section::Header;
    for line in text.lines() {
        match section {
            Section::Header => {
                if line.starts_with('#') || line.trim().is_empty() {
                    continue;
                }
                if line.trim() == "--- source ---" {
                    section = Section::Source;
                } else if let Some(v) = line.strip_prefix("obs:") {
                    obs = match v.trim() {
                        "shallow" => Observation::Shallow,
                        "deep" => Observation::Deep,
                        other => return Err(format!("unknown observation mode {other:?}")),
                    };
                } else if let Some(v) = line.strip_prefix("fn:") {
                    fn_name = Some(v.trim().to_string());
                } else if let Some(v) = line.strip_prefix("arg:") {
                    arg = Some(v.trim().to_string());
                } else if let Some(v) = line.strip_prefix("bits:") {
                    bits = v.trim().chars().map(|c| c == '1').collect();
                } else {
                    return Err(format!("unexpected replay header line {line:?}"));
                }
            }
            Section::Source => {
                if line.trim() == "--- target ---" {
                    section = Section::Target;
                } else {
                    source_text.push_str(line);
                    source_text.push('\n');
                }
            }
            Section::Target => {
                target_text.push_str(line);
                target_text.push('\n');
            }
        }
    }
    let fn_name = fn_name.ok_or("replay missing fn:")?;
    let arg_text = arg.ok_or("replay missing arg:")?;
    let source = parse_program(&source_text).map_err(|e| format!("source: {e}"))?;
    let target = parse_program(&target_text).map_err(|e| format!("target: {e}"))?;
    let arg = parse_expr_text(&arg_text, ParseOptions::default())
        .map_err(|e| format!("arg: {e}"))?;
    Ok(Replay {
        source,
        target,
        fn_name,
        arg,
        bits,
        obs,
    })
}
