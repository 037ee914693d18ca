use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bound_ent::impossibility::{theorem3_certificate, Conclusion};
use bound_ent::linalg::random::{random_hermitian, rng};
use bound_ent::ppt::{partial_transpose_dims, twirl_uu, twirl_uu_star};
use bound_ent::protocol::{
    build_e1, build_ex, convert_pipeline, cut_bounds, protocol_convert_bipartite, protocol_convert_multipartite,
    x0 as compute_x0, XMode,
};
use bound_ent::sppt::{isotropic_lp, lemma2_feasibility_search, lemma3_optimum};
use bound_ent::states::{ghz, max_entangled, w, DensityMatrix, PureState};
use bound_ent::Error;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bound-ent", version, about = "Verification reports for bound-entanglement-assisted state conversion")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Numerical tolerance for the pass/fail checks.
    #[arg(long, global = true, env = "BOUND_ENT_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the isotropic LP and compare with (m-1)/(d-1).
    Lemma3 {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        m: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        d: u32,
    },
    /// Build E1(m, d), check PPT and run the P+_m -> P+_d protocol.
    E1 {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        m: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        d: u32,
        /// Only check the partial transpose.
        #[arg(long)]
        check_ppt: bool,
        /// Only run the protocol.
        #[arg(long)]
        run_protocol: bool,
    },
    /// Convert between GHZ and W with the E(x0) resource.
    GhzW {
        #[arg(long, value_enum, default_value_t = Direction::Both)]
        dir: Direction,
        #[arg(long, value_enum, default_value_t = Mode::Tight)]
        mode: Mode,
    },
    /// Run the full conversion pipeline between two pure states.
    Convert {
        /// Source pure state (JSON).
        #[arg(long)]
        src: PathBuf,
        /// Target pure state (JSON).
        #[arg(long)]
        dst: PathBuf,
    },
    /// Certify that a mixed state cannot be distilled to a pure entangled state.
    Theorem3 {
        /// Density matrix (JSON).
        #[arg(long)]
        state: PathBuf,
        /// Output dimension for the cross-check search.
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Cycle budget per feasibility search.
        #[arg(long, default_value_t = 5000)]
        budget: usize,
    },
    /// Check [T(X)]^T_A = V(X^T_A) on random Hermitian X.
    TwirlTest {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
        d: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    W2ghz,
    Ghz2w,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Safe,
    Tight,
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct Report {
    command: String,
    pass: bool,
    checks: Vec<Check>,
    data: Value,
}

impl Report {
    fn new(command: &str) -> Self {
        Self { command: command.into(), pass: true, checks: Vec::new(), data: json!({}) }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    fn render(&self, as_json: bool) -> String {
        if as_json {
            return serde_json::to_string_pretty(self).expect("report serializes");
        }
        let mut out = format!("{}: {}", self.command, if self.pass { "PASS" } else { "FAIL" });
        for c in &self.checks {
            out.push_str(&format!("\n  [{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail));
        }
        out
    }
}

type CmdResult = Result<Report, Error>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_lemma3(m: usize, d: usize, tol: f64) -> CmdResult {
    let sol = isotropic_lp(m, d)?;
    let want = lemma3_optimum(m, d);
    let mut r = Report::new("lemma3");
    r.check(
        "optimum matches closed form",
        (sol.alpha - want).abs() <= tol,
        format!("alpha* = {} ({}), expected {want}", sol.alpha, sol.alpha_exact),
    );
    r.check(
        "vertex feasible",
        sol.constraints.iter().all(|c| c.slack >= -tol),
        format!("beta = {}, delta = {}", sol.params.beta, sol.params.delta),
    );
    r.data = serde_json::to_value(&sol)?;
    Ok(r)
}

fn cmd_e1(m: usize, d: usize, check_ppt: bool, run_protocol: bool, tol: f64) -> CmdResult {
    let (do_ppt, do_protocol) = if check_ppt || run_protocol { (check_ppt, run_protocol) } else { (true, true) };
    let e = build_e1(m, d)?;
    let mut r = Report::new("e1");
    let mut data = json!({ "m": m, "d": d, "trace": e.trace(), "regime": if d > m { "d > m" } else { "d <= m" } });
    if do_ppt {
        for c in e.ppt_certificates() {
            r.check(format!("PPT across cut {:?}", c.cut), c.ppt, format!("min eigenvalue {:.3e}", c.min_eigenvalue));
        }
        data["ppt_certificates"] = serde_json::to_value(e.ppt_certificates())?;
    }
    if do_protocol {
        let out = protocol_convert_bipartite(&e, &max_entangled(m))?;
        let fid = out.output.fidelity(&max_entangled(d));
        r.check("output is P+_d", fid >= 1.0 - tol, format!("fidelity {fid:.12}"));
        let p = out.success_probability;
        if d >= m {
            let want = 1.0 / ((m * m * (m * d + d - m)) as f64);
            r.check("success probability", (p - want).abs() <= tol, format!("{p:.12} (expected 1/{})", m * m * (m * d + d - m)));
        } else {
            r.check("success probability", p > 0.0, format!("{p:.12}"));
        }
        data["success_probability"] = json!(p);
        data["fidelity"] = json!(fid);
    }
    r.data = data;
    Ok(r)
}

fn cmd_ghz_w(dir: Direction, mode: Mode, tol: f64) -> CmdResult {
    let mode = match mode {
        Mode::Safe => XMode::Safe,
        Mode::Tight => XMode::Tight,
    };
    let runs: Vec<(&str, PureState, PureState)> = match dir {
        Direction::W2ghz => vec![("w2ghz", w(), ghz())],
        Direction::Ghz2w => vec![("ghz2w", ghz(), w())],
        Direction::Both => vec![("w2ghz", w(), ghz()), ("ghz2w", ghz(), w())],
    };
    let mut r = Report::new("ghz-w");
    let mut data = Vec::new();
    for (name, psi, phi) in runs {
        let x = compute_x0(&psi, &phi, mode)?;
        let bounds = cut_bounds(&psi, &phi)?;
        let e = build_ex(&psi, &phi, x)?;
        let out = protocol_convert_multipartite(&e, &psi)?;
        let fid = out.output.fidelity(&phi);
        r.check(format!("{name}: x0 > 0"), x > 0.0, format!("x0 = {x}"));
        r.check(format!("{name}: PPT on every cut"), e.is_ppt_everywhere(), "");
        r.check(format!("{name}: fidelity"), fid >= 1.0 - tol, format!("{fid:.12}"));
        r.check(
            format!("{name}: success probability > 0"),
            out.success_probability > 0.0,
            format!("{:.6e}", out.success_probability),
        );
        data.push(json!({
            "direction": name,
            "x0": x,
            "cut_bounds": bounds,
            "ppt_certificates": e.ppt_certificates(),
            "fidelity": fid,
            "success_probability": out.success_probability,
        }));
    }
    r.data = Value::Array(data);
    Ok(r)
}

fn cmd_convert(src: &Path, dst: &Path, tol: f64) -> CmdResult {
    let psi: PureState = read_json(src)?;
    let phi: PureState = read_json(dst)?;
    let plan = convert_pipeline(&psi, &phi)?;
    let mut r = Report::new("convert");
    r.check("final fidelity", plan.fidelity >= 1.0 - tol.max(1e-8), format!("{:.12}", plan.fidelity));
    r.check("positive probability", plan.total_probability > 0.0, format!("{:.6e}", plan.total_probability));
    r.data = json!({ "stages": plan.stages, "total_probability": plan.total_probability, "fidelity": plan.fidelity });
    Ok(r)
}

fn cmd_theorem3(state: &Path, d: usize, budget: usize) -> CmdResult {
    let raw: DensityMatrix = read_json(state)?;
    let rho = DensityMatrix::new(raw.op().clone(), raw.parties().clone())?;
    let cert = theorem3_certificate(&rho)?;
    let mut r = Report::new("theorem3");
    r.check(
        "structural certificate",
        cert.conclusion == Conclusion::ImpossibleByStructure,
        format!("{:?}: {}", cert.conclusion, cert.reason),
    );
    r.check("certificate re-verifies", cert.verify(&rho)?, format!("tr(rho P_A) = {:.3e}", cert.trace_rho_on_a_support));
    let mut searches = Vec::new();
    for p in [0.5, 0.1, 0.01] {
        let out = lemma2_feasibility_search(&rho, d, p, budget)?;
        r.check(
            format!("search finds no map at p = {p}"),
            !out.is_feasible(),
            if out.is_feasible() { "Feasible" } else { "NoCertificate" },
        );
        searches.push(json!({ "p_target": p, "feasible": out.is_feasible() }));
    }
    r.data = json!({ "certificate": cert, "searches": searches });
    Ok(r)
}

fn cmd_twirl_test(ds: &[usize], samples: usize, seed: u64, tol: f64) -> CmdResult {
    let mut r = Report::new("twirl-test");
    let mut g = rng(seed);
    let mut data = Vec::new();
    for &d in ds {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("d = {d} must be at least 2")));
        }
        let (mut ident, mut idem, mut trace) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let x = random_hermitian(d * d, &mut g);
            let t = twirl_uu_star(&x, d)?;
            let lhs = partial_transpose_dims(&t, &[d, d], &[0])?;
            let rhs = twirl_uu(&partial_transpose_dims(&x, &[d, d], &[0])?, d)?;
            ident = ident.max(lhs.max_abs_diff(&rhs));
            idem = idem.max(twirl_uu_star(&t, d)?.max_abs_diff(&t));
            trace = trace.max((t.trace() - x.trace()).norm());
        }
        r.check(format!("d = {d}: [T(X)]^T_A = V(X^T_A)"), ident <= tol, format!("max deviation {ident:.3e}"));
        r.check(format!("d = {d}: T idempotent"), idem <= tol, format!("max deviation {idem:.3e}"));
        r.check(format!("d = {d}: T trace preserving"), trace <= tol, format!("max deviation {trace:.3e}"));
        data.push(json!({ "d": d, "samples": samples, "identity": ident, "idempotence": idem, "trace": trace }));
    }
    r.data = Value::Array(data);
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = cli.tol;
    let result = match &cli.command {
        Command::Lemma3 { m, d } => cmd_lemma3(*m as usize, *d as usize, tol),
        Command::E1 { m, d, check_ppt, run_protocol } => cmd_e1(*m as usize, *d as usize, *check_ppt, *run_protocol, tol),
        Command::GhzW { dir, mode } => cmd_ghz_w(*dir, *mode, tol),
        Command::Convert { src, dst } => cmd_convert(src, dst, tol),
        Command::Theorem3 { state, d, budget } => cmd_theorem3(state, *d, *budget),
        Command::TwirlTest { d, samples } => cmd_twirl_test(d, *samples, cli.seed, tol),
    };
    match result {
        Ok(report) => {
            let _ = writeln!(std::io::stdout(), "{}", report.render(cli.json));
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(1)
        }
    }
}
