//! `spinhiggs <action> [--config FILE | flags]`
//!
//! Actions: simulate, dims, check, spectrum. Flags mirror the scenario
//! fields; `SPINHIGGS_SEED` overrides the configured seed. Exit status:
//! 0 = run complete / all checks pass, 1 = validation error, 2 = numerical
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use spinhiggs::scenario::{
    validate, CurveCfg, IntegratorCfg, NumOrPair, ParamsCfg, ScenarioCfg, ScenarioError,
};

const USAGE: &str = "usage: spinhiggs <simulate|dims|check|spectrum> [options]
options:
  --config FILE          JSON scenario (flags below override its fields)
  --model top|cm|gaudin  model for simulate (default top)
  --class complex_v|type_iii|type_iv
  --tau RE,IM            elliptic curve modular parameter
  --J a,b,c              inertia coefficients (numbers or re:im)
  --j-from-curve         derive inertia from the curve's half-periods
  --variant V|III|IV     Calogero-Moser variant
  --marks z1,z2,...      Gaudin marked points (numbers or re:im)
  --site N               Gaudin flow site (default 0)
  --hamiltonian h1|h2    Gaudin flow generator (default h1)
  --l L                  spin of the quantum top (half-integers allowed)
  --type A1[,E8,...]     group types for dims (default A1)
  --genus N              genus for dims (default 1)
  --marked N             marked points for dims (default 1)
  --dt X --t-end X --project-every N --tol X
  --initial random:SEED  random initial state
  --seed N               scan/sampling seed (default 0)
  --out-dir DIR          output directory (default .)";

fn parse_num_or_pair(item: &str) -> Result<NumOrPair, ScenarioError> {
    if let Some((re, im)) = item.split_once(':') {
        let re: f64 = re
            .trim()
            .parse()
            .map_err(|_| ScenarioError::new("<flag>", format!("bad number '{item}'")))?;
        let im: f64 = im
            .trim()
            .parse()
            .map_err(|_| ScenarioError::new("<flag>", format!("bad number '{item}'")))?;
        Ok(NumOrPair::Pair([re, im]))
    } else {
        let re: f64 = item
            .trim()
            .parse()
            .map_err(|_| ScenarioError::new("<flag>", format!("bad number '{item}'")))?;
        Ok(NumOrPair::Real(re))
    }
}

fn parse_list(s: &str) -> Result<Vec<NumOrPair>, ScenarioError> {
    s.split(',').map(parse_num_or_pair).collect()
}

struct Cli {
    cfg: ScenarioCfg,
    out_dir: PathBuf,
}

fn parse_args(args: &[String]) -> Result<Cli, ScenarioError> {
    if args.is_empty() {
        return Err(ScenarioError::new("<args>", "missing action"));
    }
    let action = args[0].clone();
    let mut cfg = ScenarioCfg {
        action,
        model: None,
        class: None,
        curve: None,
        params: None,
        initial: None,
        integrator: None,
        seed: None,
        outputs: None,
    };
    let mut out_dir = PathBuf::from(".");

    let mut it = args[1..].iter().peekable();
    let take_value = |flag: &str, it: &mut std::iter::Peekable<std::slice::Iter<String>>| {
        it.next()
            .cloned()
            .ok_or_else(|| ScenarioError::new(flag, "missing value"))
    };

    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                let path = take_value("--config", &mut it)?;
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    ScenarioError::new("--config", format!("cannot read {path}: {e}"))
                })?;
                let mut loaded: ScenarioCfg = serde_json::from_str(&text)
                    .map_err(|e| ScenarioError::new("--config", format!("invalid JSON: {e}")))?;
                loaded.action = cfg.action.clone();
                cfg = ScenarioCfg {
                    model: cfg.model.or(loaded.model),
                    class: cfg.class.or(loaded.class),
                    curve: cfg.curve.or(loaded.curve),
                    params: cfg.params.or(loaded.params),
                    initial: cfg.initial.or(loaded.initial),
                    integrator: cfg.integrator.or(loaded.integrator),
                    seed: cfg.seed.or(loaded.seed),
                    outputs: cfg.outputs.or(loaded.outputs),
                    action: cfg.action,
                };
            }
            "--model" => cfg.model = Some(take_value("--model", &mut it)?),
            "--class" => cfg.class = Some(take_value("--class", &mut it)?),
            "--tau" => {
                let v = take_value("--tau", &mut it)?;
                let (re, im) = v
                    .split_once(',')
                    .ok_or_else(|| ScenarioError::new("--tau", "expected RE,IM"))?;
                cfg.curve = Some(CurveCfg {
                    tau_re: re
                        .trim()
                        .parse()
                        .map_err(|_| ScenarioError::new("--tau", "bad real part"))?,
                    tau_im: im
                        .trim()
                        .parse()
                        .map_err(|_| ScenarioError::new("--tau", "bad imaginary part"))?,
                    trunc_tol: None,
                    max_terms: None,
                });
            }
            "--J" => {
                let v = take_value("--J", &mut it)?;
                params_mut(&mut cfg).j = Some(parse_list(&v)?);
            }
            "--j-from-curve" => params_mut(&mut cfg).j_from_curve = Some(true),
            "--variant" => {
                let v = take_value("--variant", &mut it)?;
                params_mut(&mut cfg).variant = Some(v);
            }
            "--marks" => {
                let v = take_value("--marks", &mut it)?;
                params_mut(&mut cfg).marks = Some(parse_list(&v)?);
            }
            "--site" => {
                let v = take_value("--site", &mut it)?;
                params_mut(&mut cfg).site = Some(
                    v.parse()
                        .map_err(|_| ScenarioError::new("--site", "expected an index"))?,
                );
            }
            "--hamiltonian" => {
                let v = take_value("--hamiltonian", &mut it)?;
                params_mut(&mut cfg).hamiltonian = Some(v);
            }
            "--l" => {
                let v = take_value("--l", &mut it)?;
                params_mut(&mut cfg).l = Some(
                    v.parse()
                        .map_err(|_| ScenarioError::new("--l", "expected a number"))?,
                );
            }
            "--type" => {
                let v = take_value("--type", &mut it)?;
                params_mut(&mut cfg).types =
                    Some(v.split(',').map(|s| s.trim().to_string()).collect());
            }
            "--genus" => {
                let v = take_value("--genus", &mut it)?;
                params_mut(&mut cfg).genus = Some(v.parse().map_err(|_| {
                    ScenarioError::new("--genus", "expected a non-negative integer")
                })?);
            }
            "--marked" => {
                let v = take_value("--marked", &mut it)?;
                params_mut(&mut cfg).marked = Some(v.parse().map_err(|_| {
                    ScenarioError::new("--marked", "expected a non-negative integer")
                })?);
            }
            "--dt" | "--t-end" | "--project-every" | "--tol" => {
                let flag = arg.clone();
                let v = take_value(&flag, &mut it)?;
                let ic = cfg.integrator.get_or_insert(IntegratorCfg {
                    dt: None,
                    t_end: None,
                    project_every: None,
                    tol: None,
                });
                match flag.as_str() {
                    "--dt" => {
                        ic.dt = Some(
                            v.parse()
                                .map_err(|_| ScenarioError::new("--dt", "expected a number"))?,
                        )
                    }
                    "--t-end" => {
                        ic.t_end = Some(
                            v.parse()
                                .map_err(|_| ScenarioError::new("--t-end", "expected a number"))?,
                        )
                    }
                    "--project-every" => {
                        ic.project_every = Some(v.parse().map_err(|_| {
                            ScenarioError::new("--project-every", "expected an integer")
                        })?)
                    }
                    _ => {
                        ic.tol = Some(
                            v.parse()
                                .map_err(|_| ScenarioError::new("--tol", "expected a number"))?,
                        )
                    }
                }
            }
            "--initial" => {
                let v = take_value("--initial", &mut it)?;
                cfg.initial = Some(spinhiggs::scenario::InitialCfg::Random(v));
            }
            "--seed" => {
                let v = take_value("--seed", &mut it)?;
                cfg.seed = Some(
                    v.parse()
                        .map_err(|_| ScenarioError::new("--seed", "expected an unsigned integer"))?,
                );
            }
            "--out-dir" => out_dir = PathBuf::from(take_value("--out-dir", &mut it)?),
            "--help" | "-h" => {
                return Err(ScenarioError::new("help", USAGE));
            }
            other => {
                return Err(ScenarioError::new(
                    "<args>",
                    format!("unknown flag '{other}'"),
                ))
            }
        }
    }
    Ok(Cli { cfg, out_dir })
}

fn params_mut(cfg: &mut ScenarioCfg) -> &mut ParamsCfg {
    cfg.params.get_or_insert_with(ParamsCfg::default)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_args(&args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.field == "help" {
                println!("{}", e.message);
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e}");
            eprintln!("{USAGE}");
            return ExitCode::from(1);
        }
    };
    let scenario = match validate(cli.cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: validation error: {e}");
            return ExitCode::from(1);
        }
    };
    match spinhiggs::dispatch(&scenario, &cli.out_dir) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
