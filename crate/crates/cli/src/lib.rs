//! Command-line front end: argument handling, scans and output.

pub mod args;
pub mod commands;
pub mod output;

use std::io::Write;

use clap::Parser;
use rayon::prelude::*;

use args::{Cli, Command, ScanArgs, ValidateArgs};
use commands::{Outcome, Status};
use etcrit_core::validate::{self, Perturbation, ValidateOptions};
use output::{render, Cell, Format, Row};

pub const THREADS_VAR: &str = "ETCRIT_THREADS";

/// Runs the program with `argv` (including the program name) and returns the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with(argv: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(m) => {
            let _ = writeln!(err, "error: {m}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => hoist_scan_globals(c),
        Err(e) => {
            use clap::error::ErrorKind::*;
            return match e.kind() {
                DisplayHelp | DisplayVersion | DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };

    let (text, code) = match &cli.command {
        Command::Scan(s) => match scan(s) {
            Ok(rows) => (render(&rows, cli.output), 0),
            Err(m) => {
                let _ = writeln!(err, "error: {m}");
                return 1;
            }
        },
        Command::Validate(v) => match run_validate(v, cli.output) {
            Ok(x) => x,
            Err(m) => {
                let _ = writeln!(err, "error: {m}");
                return 1;
            }
        },
        single => {
            let o = execute(single).expect("single command");
            for w in &o.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            match &o.status {
                Status::Ok => {}
                Status::Unbound(m) => {
                    let _ = writeln!(err, "unbound: {m}");
                }
                s => {
                    let _ = writeln!(err, "{}", s.label());
                }
            }
            (render(&[o.row], cli.output), o.status.exit_code())
        }
    };

    let written = match &cli.output_path {
        Some(path) => std::fs::write(path, text.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(m) = written {
        let _ = writeln!(err, "error: {m}");
        return 1;
    }
    code
}

/// Output flags written after the scanned command apply to the scan itself.
fn hoist_scan_globals(mut cli: Cli) -> Cli {
    let Command::Scan(s) = &mut cli.command else {
        return cli;
    };
    let mut kept = Vec::with_capacity(s.command.len());
    let mut it = std::mem::take(&mut s.command).into_iter();
    while let Some(a) = it.next() {
        let (key, inline) = match a.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (a.clone(), None),
        };
        if key != "--output" && key != "--output-path" {
            kept.push(a);
            continue;
        }
        let Some(value) = inline.or_else(|| it.next()) else {
            kept.push(a);
            break;
        };
        if key == "--output" {
            match <Format as clap::ValueEnum>::from_str(&value, true) {
                Ok(f) => cli.output = f,
                Err(_) => {
                    kept.push(a);
                    kept.push(value);
                }
            }
        } else {
            cli.output_path = Some(value.into());
        }
    }
    s.command = kept;
    cli
}

fn execute(cmd: &Command) -> Option<Outcome> {
    Some(match cmd {
        Command::CritId(a) => commands::crit_id(a),
        Command::EnergyId(a) => commands::energy_id(a),
        Command::CritMixed(a) => commands::crit_mixed(a),
        Command::EnergyMixed(a) => commands::energy_mixed(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Scan(_) | Command::Validate(_) => return None,
    })
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {} is not key = value", i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(format!("config line {} has an empty key", i + 1));
        }
        pairs.push((k.to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Splices `--config FILE` entries into `argv` so that explicit flags win.
fn expand_config(mut argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                return Err("--config needs a file".into());
            }
            path = Some(argv.remove(i + 1));
            argv.remove(i);
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            path = Some(p.to_string());
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text =
        std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let pairs = parse_config(&text)?;
    let flag = |(k, v): &(String, String)| [format!("--{k}"), v.clone()];

    let Some(sub) = argv
        .iter()
        .position(|a| Command::NAMES.contains(&a.as_str()))
    else {
        return Ok(argv);
    };
    let outer_keys = ["vary", "output", "output-path"];
    if argv[sub] == "scan" {
        let inner = argv[sub + 1..]
            .iter()
            .position(|a| Command::NAMES.contains(&a.as_str()))
            .map(|p| p + sub + 1);
        let (outer, rest): (Vec<_>, Vec<_>) = pairs
            .iter()
            .partition(|p| outer_keys.contains(&p.0.as_str()));
        if let Some(inner) = inner {
            let tail: Vec<String> = rest.iter().flat_map(|p| flag(p)).collect();
            argv.splice(inner + 1..inner + 1, tail);
        } else if !rest.is_empty() {
            return Err("config sets command flags but the scan names no command".into());
        }
        let head: Vec<String> = outer.iter().flat_map(|p| flag(p)).collect();
        argv.splice(sub + 1..sub + 1, head);
    } else {
        let all: Vec<String> = pairs.iter().flat_map(flag).collect();
        argv.splice(sub + 1..sub + 1, all);
    }
    Ok(argv)
}

/// Expands one `--vary` value list.
pub fn parse_vary(spec: &str) -> Result<(String, Vec<String>), String> {
    let (name, values) = spec
        .split_once('=')
        .ok_or_else(|| format!("--vary expects NAME=VALUES, got '{spec}'"))?;
    let name = name.trim().trim_start_matches("--").to_string();
    if name.is_empty() {
        return Err(format!("--vary '{spec}' has no parameter name"));
    }
    let parts: Vec<&str> = values.split(':').collect();
    let list = if parts.len() == 3 {
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad range bound '{s}' in --vary '{spec}'"))
        };
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(format!(
                "range in --vary '{spec}' needs start <= stop and step > 0"
            ));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let v = start + i as f64 * step;
                // strip accumulated rounding so values print as typed
                let v: f64 = format!("{v:.12e}").parse().expect("formatted float");
                format!("{v}")
            })
            .collect()
    } else {
        values
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
    };
    if list.is_empty() {
        return Err(format!("--vary '{spec}' gives no values"));
    }
    Ok((name, list))
}

fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_VAR} must be a positive integer, got '{v}'"
            )),
        },
    }
}

/// Runs every point of a scan; rows come back in input order.
pub fn scan(s: &ScanArgs) -> Result<Vec<Row>, String> {
    let inner_name = s.command.first().ok_or("scan needs a command")?;
    if !Command::NAMES[..5].contains(&inner_name.as_str()) {
        return Err(format!("cannot scan '{inner_name}'"));
    }
    let axes: Vec<(String, Vec<String>)> = s
        .vary
        .iter()
        .map(|v| parse_vary(v))
        .collect::<Result<_, _>>()?;

    let mut points: Vec<Vec<(String, String)>> = vec![vec![]];
    for (name, values) in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((name.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }

    let mut jobs = Vec::with_capacity(points.len());
    for p in &points {
        let mut argv = vec!["etcrit".to_string()];
        argv.extend(s.command.iter().cloned());
        for (k, v) in p {
            argv.push(format!("--{k}"));
            argv.push(v.clone());
        }
        let cli = Cli::try_parse_from(&argv).map_err(|e| e.to_string().trim_end().to_string())?;
        jobs.push((p.clone(), cli.command));
    }

    let run_all = || -> Vec<Row> {
        jobs.par_iter()
            .map(|(p, cmd)| {
                let o = execute(cmd).expect("scannable command");
                let mut row = Row::default();
                for (k, v) in p {
                    row.push(&format!("vary_{k}"), Cell::guess(v));
                }
                row.0.extend(o.row.0);
                row
            })
            .collect()
    };
    let rows = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())?
            .install(run_all),
        None => run_all(),
    };
    Ok(rows)
}

fn run_validate(v: &ValidateArgs, format: Format) -> Result<(String, i32), String> {
    let mut opts = ValidateOptions::default();
    if let Some(seed) = v.seed {
        opts.seed = seed;
    }
    if let Some(p) = &v.perturb {
        let (id, rel) = p
            .split_once('=')
            .ok_or_else(|| format!("--perturb expects ID=RELATIVE, got '{p}'"))?;
        opts.perturbation = Some(Perturbation {
            criterion: id
                .trim()
                .parse()
                .map_err(|_| format!("bad criterion id '{id}'"))?,
            relative: rel
                .trim()
                .parse()
                .map_err(|_| format!("bad relative change '{rel}'"))?,
        });
    }
    let report = validate::validate(&opts);
    let code = if report.iter().all(|r| r.pass) { 0 } else { 1 };
    let text = match format {
        Format::Table => report.iter().map(|r| format!("{r}\n")).collect(),
        f => {
            let rows: Vec<Row> = report
                .iter()
                .map(|r| {
                    let mut row = Row::default();
                    row.push("id", r.id as usize);
                    row.push("name", r.name);
                    row.push("pass", if r.pass { "true" } else { "false" });
                    row.push("detail", r.detail.as_str());
                    row
                })
                .collect();
            render(&rows, f)
        }
    };
    Ok((text, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vary_lists_and_ranges() {
        assert_eq!(
            parse_vary("mb=0.5,1,inf").unwrap().1,
            vec!["0.5", "1", "inf"]
        );
        let (name, v) = parse_vary("gab=0.2:0.5:0.1").unwrap();
        assert_eq!(name, "gab");
        assert_eq!(v, vec!["0.2", "0.3", "0.4", "0.5"]);
        assert!(parse_vary("gab").is_err());
        assert!(parse_vary("gab=1:0:0.1").is_err());
        assert!(parse_vary("gab=").is_err());
    }

    #[test]
    fn config_lines() {
        let pairs = parse_config("# fig 3\nNa = 2\n--mb=inf # static\n\n").unwrap();
        assert_eq!(
            pairs,
            vec![("Na".into(), "2".into()), ("mb".into(), "inf".into())]
        );
        assert!(parse_config("Na 2").is_err());
    }
}
