//! Command-line front end: exact rank invariants, generators, verification
//! suites, certificate re-checking, and the constants table, all as
//! versioned JSON with deterministic seeded randomness and an optional
//! content-addressed result cache.

use clap::{Args, Parser, Subcommand};
use mlv::error::Error;
use mlv::exact_arith::{seeded_rng, FieldId, Scalar};
use mlv::families::{build_family, certify_family, shifted_system};
use mlv::groebner::set_default_step_budget;
use mlv::invariants::{
    analytic_rank_bounds, birch_rank, collective_strength_bounds, geometric_rank,
    partition_rank_bounds, run_suite, strength_bounds, theorem_constants, SliceChoice, SuiteConfig,
};
use mlv::json::{
    check_family_proof, constants_to_json, family_proof_from_json, family_proof_to_json,
    invariant_report_to_json, poly_from_json, stratification_to_json, suite_report_to_json,
    tensor_from_json, tensor_to_json, FamilyProofJson, PolyJson, TensorJson,
};
use mlv::multipoly::MultiPoly;
use mlv::strata::verify_codim_formula;
use mlv::tensor_core::{generate, BlockPoint, GeneratorKind, Tensor};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(name = "mlv", version, about = "Exact workbench for rank invariants of multilinear maps")]
struct Cli {
    /// Result cache directory (content-addressed; never changes payloads).
    #[arg(long, global = true, env = "MLV_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Step budget for the Gröbner engine.
    #[arg(long, global = true, env = "MLV_STEP_BUDGET")]
    step_budget: Option<u64>,
    /// Write the JSON report here in addition to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute an invariant report for a tensor or polynomial input.
    Compute {
        /// One of: gr, ar, pr, codim, brk, strength, collective-brk,
        /// collective-strength, family.
        op: String,
        #[command(flatten)]
        input: InputArgs,
        /// Slicing block for gr on forms: "default", "all", or a block index.
        #[arg(long, default_value = "default")]
        slice: String,
        /// Base-point budget for the ar family search.
        #[arg(long, default_value_t = 8)]
        points: usize,
        /// Vanishing trials for family certification.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Base solution for family, blocks separated by ';',
        /// coordinates by ',' (default: the origin).
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Write a generated tensor as JSON.
    Gen {
        /// Generator spec, e.g. quaternion:-1,-1 | matmul:2 | matmul-map:2 |
        /// diag:3,2,4 | random:2x3x2,1,F101,5,60
        spec: String,
    },
    /// Run a randomized verification suite; nonzero exit iff a trial fails.
    Verify {
        /// Suite name: codim-formula, krull, fixed-rank, slicing,
        /// additivity, monotonicity, subadditivity, directsum-pr.
        suite: String,
        #[arg(short = 'n', long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Block sizes, comma separated.
        #[arg(long, default_value = "2,2,2")]
        shape: String,
        #[arg(long, default_value = "F:101")]
        field: String,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Independently re-verify a family proof object.
    CheckCert { path: PathBuf },
    /// Print the constants table for degree d and tuple size m.
    Constants {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Input JSON file (tensor or polynomial list, depending on the op).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Generator spec instead of a file.
    #[arg(long)]
    gen: Option<String>,
}

fn parse_field(s: &str) -> Result<FieldId, Error> {
    if let Ok(f) = FieldId::parse(s) {
        return Ok(f);
    }
    if let Some(p) = s.strip_prefix('F') {
        return FieldId::parse(&format!("F:{p}"));
    }
    Err(Error::BadParams(format!("bad field {s:?}")))
}

fn parse_generator(spec: &str) -> Result<GeneratorKind, Error> {
    let (name, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::BadParams(format!("generator spec {spec:?} needs name:args")))?;
    let nums = |s: &str| -> Result<Vec<i64>, Error> {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| Error::BadParams(format!("bad integer in {s:?}"))))
            .collect()
    };
    match name {
        "quaternion" => {
            let v = nums(rest)?;
            if v.len() != 2 {
                return Err(Error::BadParams("quaternion:a,b".into()));
            }
            Ok(GeneratorKind::Quaternion { a: v[0], b: v[1] })
        }
        "matmul" => Ok(GeneratorKind::MatmulForm {
            r: rest.trim().parse().map_err(|_| Error::BadParams("matmul:r".into()))?,
        }),
        "matmul-map" => Ok(GeneratorKind::MatmulMap {
            r: rest.trim().parse().map_err(|_| Error::BadParams("matmul-map:r".into()))?,
        }),
        "diag" => {
            let v = nums(rest)?;
            if v.len() != 3 {
                return Err(Error::BadParams("diag:d,r,n".into()));
            }
            Ok(GeneratorKind::Diag {
                d: v[0] as usize,
                r: v[1] as usize,
                n: v[2] as usize,
            })
        }
        "random" => {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 5 {
                return Err(Error::BadParams("random:SIZESxSIZES,m,field,seed,density".into()));
            }
            let sizes = parts[0]
                .split('x')
                .map(|x| x.parse().map_err(|_| Error::BadParams("bad sizes".into())))
                .collect::<Result<Vec<usize>, Error>>()?;
            Ok(GeneratorKind::Random {
                sizes,
                m: parts[1].parse().map_err(|_| Error::BadParams("bad m".into()))?,
                field: parse_field(parts[2])?,
                seed: parts[3].parse().map_err(|_| Error::BadParams("bad seed".into()))?,
                density_percent: parts[4]
                    .parse()
                    .map_err(|_| Error::BadParams("bad density".into()))?,
            })
        }
        other => Err(Error::BadParams(format!("unknown generator {other:?}"))),
    }
}

/// Canonical input text plus the parsed tensor, for cache keying.
fn load_tensor(input: &InputArgs) -> Result<(String, Tensor), Error> {
    match (&input.input, &input.gen) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Msg(format!("cannot read {}: {e}", path.display())))?;
            let j: TensorJson = serde_json::from_str(&text)
                .map_err(|e| Error::MalformedCert(format!("bad tensor JSON: {e}")))?;
            let t = tensor_from_json(&j)?;
            let canon = serde_json::to_string(&tensor_to_json(&t)).unwrap();
            Ok((canon, t))
        }
        (None, Some(spec)) => {
            let t = generate(parse_generator(spec)?)?;
            Ok((format!("gen:{spec}"), t))
        }
        _ => Err(Error::BadParams("provide exactly one of --in / --gen".into())),
    }
}

fn load_polys(input: &InputArgs) -> Result<(String, Vec<MultiPoly>), Error> {
    let path = input
        .input
        .as_ref()
        .ok_or_else(|| Error::BadParams("polynomial ops need --in".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Msg(format!("cannot read {}: {e}", path.display())))?;
    let list: Vec<PolyJson> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(|e| Error::MalformedCert(format!("bad JSON: {e}")))?
    } else {
        vec![serde_json::from_str(&text)
            .map_err(|e| Error::MalformedCert(format!("bad JSON: {e}")))?]
    };
    let polys = list.iter().map(poly_from_json).collect::<Result<Vec<_>, _>>()?;
    let canon: Vec<PolyJson> = polys.iter().map(mlv::json::poly_to_json).collect();
    Ok((serde_json::to_string(&canon).unwrap(), polys))
}

fn parse_base(spec: &str, t: &Tensor) -> Result<BlockPoint, Error> {
    let field = t.field();
    let coords = spec
        .split(';')
        .map(|blk| {
            blk.split(',')
                .map(|c| Scalar::parse(field, c))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let p = BlockPoint { coords };
    if p.coords.len() != t.num_blocks()
        || p.coords.iter().zip(t.blocks().sizes()).any(|(b, &n)| b.len() != n)
    {
        return Err(Error::BadParams("base point shape disagrees with the input".into()));
    }
    Ok(p)
}

fn parse_slice(s: &str) -> Result<SliceChoice, Error> {
    match s {
        "default" => Ok(SliceChoice::Default),
        "all" => Ok(SliceChoice::All),
        other => other
            .parse()
            .map(SliceChoice::Block)
            .map_err(|_| Error::BadParams(format!("bad slice {other:?}"))),
    }
}

struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    fn key(&self, parts: &[&str]) -> String {
        let mut h = Sha256::new();
        for p in parts {
            h.update(p.as_bytes());
            h.update([0]);
        }
        format!("{:x}", h.finalize())
    }

    fn get(&self, key: &str) -> Option<String> {
        let dir = self.dir.as_ref()?;
        std::fs::read_to_string(dir.join(format!("{key}.json"))).ok()
    }

    fn put(&self, key: &str, payload: &str, elapsed_ms: u128) {
        let Some(dir) = self.dir.as_ref() else { return };
        if std::fs::create_dir_all(dir).is_err() {
            return;
        }
        let _ = std::fs::write(dir.join(format!("{key}.json")), payload);
        // timings live in a sidecar so cached payloads stay byte-identical
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let sidecar = serde_json::json!({ "elapsed_ms": elapsed_ms, "created_unix": now });
        let _ = std::fs::write(dir.join(format!("{key}.sidecar.json")), sidecar.to_string());
    }
}

fn run(cli: &Cli) -> Result<(String, bool), Error> {
    let cache = Cache {
        dir: cli.cache_dir.clone(),
    };
    let budget_tag = cli.step_budget.map(|b| b.to_string()).unwrap_or_default();
    match &cli.cmd {
        Cmd::Compute {
            op,
            input,
            slice,
            points,
            trials,
            base,
            seed,
        } => {
            let knobs = format!("{op}|{slice}|{points}|{trials}|{seed}|{budget_tag}|{:?}", base);
            let payload = |canon: &str, body: &dyn Fn() -> Result<String, Error>| -> Result<String, Error> {
                let key = cache.key(&["compute", canon, &knobs]);
                if let Some(hit) = cache.get(&key) {
                    return Ok(hit);
                }
                let start = Instant::now();
                let text = body()?;
                cache.put(&key, &text, start.elapsed().as_millis());
                Ok(text)
            };
            let text = match op.as_str() {
                "gr" => {
                    let (canon, t) = load_tensor(input)?;
                    let s = parse_slice(slice)?;
                    payload(&canon, &|| {
                        let rep = geometric_rank(&t, s)?;
                        Ok(serde_json::to_string_pretty(&invariant_report_to_json(&rep)).unwrap())
                    })?
                }
                "ar" => {
                    let (canon, t) = load_tensor(input)?;
                    payload(&canon, &|| {
                        let rep = analytic_rank_bounds(&t, *points, *seed)?;
                        Ok(serde_json::to_string_pretty(&invariant_report_to_json(&rep)).unwrap())
                    })?
                }
                "pr" => {
                    let (canon, t) = load_tensor(input)?;
                    payload(&canon, &|| {
                        let rep = partition_rank_bounds(&t)?;
                        Ok(serde_json::to_string_pretty(&invariant_report_to_json(&rep)).unwrap())
                    })?
                }
                "codim" => {
                    let (canon, t) = load_tensor(input)?;
                    payload(&canon, &|| {
                        let rep = verify_codim_formula(&t)?;
                        Ok(serde_json::to_string_pretty(&stratification_to_json(&rep)).unwrap())
                    })?
                }
                "brk" | "collective-brk" => {
                    let (canon, ps) = load_polys(input)?;
                    payload(&canon, &|| {
                        let rep = birch_rank(&ps)?;
                        Ok(serde_json::to_string_pretty(&invariant_report_to_json(&rep)).unwrap())
                    })?
                }
                "strength" => {
                    let (canon, ps) = load_polys(input)?;
                    payload(&canon, &|| {
                        if ps.len() != 1 {
                            return Err(Error::BadParams(
                                "strength expects a single polynomial; use collective-strength".into(),
                            ));
                        }
                        let rep = strength_bounds(&ps[0])?;
                        Ok(serde_json::to_string_pretty(&invariant_report_to_json(&rep)).unwrap())
                    })?
                }
                "collective-strength" => {
                    let (canon, ps) = load_polys(input)?;
                    payload(&canon, &|| {
                        let rep = collective_strength_bounds(&ps, *seed)?;
                        Ok(serde_json::to_string_pretty(&invariant_report_to_json(&rep)).unwrap())
                    })?
                }
                "family" => {
                    let (canon, t) = load_tensor(input)?;
                    payload(&canon, &|| {
                        let v = match base {
                            Some(spec) => parse_base(spec, &t)?,
                            None => BlockPoint::zero(t.field(), t.blocks()),
                        };
                        let c = t.eval(&v)?;
                        let ss = shifted_system(&t, &v, &c)?;
                        let mut rng = seeded_rng(*seed);
                        let fam = build_family(&ss, &mut rng)?;
                        let cert = certify_family(&fam, &ss, *trials, &mut rng)?;
                        let proof = family_proof_to_json(&t, &c, &fam, &cert);
                        Ok(serde_json::to_string_pretty(&proof).unwrap())
                    })?
                }
                other => return Err(Error::BadParams(format!("unknown op {other:?}"))),
            };
            Ok((text, true))
        }
        Cmd::Gen { spec } => {
            let t = generate(parse_generator(spec)?)?;
            Ok((serde_json::to_string_pretty(&tensor_to_json(&t)).unwrap(), true))
        }
        Cmd::Verify {
            suite,
            trials,
            seed,
            shape,
            field,
            d,
            m,
        } => {
            let cfg = SuiteConfig {
                trials: *trials,
                seed: *seed,
                shape: shape
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| Error::BadParams("bad shape".into())))
                    .collect::<Result<Vec<usize>, Error>>()?,
                field: parse_field(field)?,
                d: *d,
                m: *m,
            };
            let rep = run_suite(suite, &cfg)?;
            let text = serde_json::to_string_pretty(&suite_report_to_json(&rep)).unwrap();
            Ok((text, rep.all_passed()))
        }
        Cmd::CheckCert { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Msg(format!("cannot read {}: {e}", path.display())))?;
            let j: FamilyProofJson = serde_json::from_str(&text)
                .map_err(|e| Error::MalformedCert(format!("bad proof JSON: {e}")))?;
            let proof = family_proof_from_json(&j)?;
            check_family_proof(&proof)?;
            let out = serde_json::json!({
                "schema": "1",
                "verdict": true,
                "jac_rank": proof.certificate.jac_rank,
                "codim_bound": proof.certificate.codim_bound,
                "vanishing_trials": proof.certificate.vanishing_trials,
            });
            Ok((serde_json::to_string_pretty(&out).unwrap(), true))
        }
        Cmd::Constants { d, m } => {
            let t = theorem_constants(*d, *m)?;
            Ok((serde_json::to_string_pretty(&constants_to_json(&t)).unwrap(), true))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit(_) => 2,
        Error::CheckFailed(_) => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(b) = cli.step_budget {
        set_default_step_budget(b);
    }
    match run(&cli) {
        Ok((text, ok)) => {
            println!("{text}");
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(3);
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
