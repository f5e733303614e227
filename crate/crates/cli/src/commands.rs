//! Command-line definition and the pipeline behind each subcommand.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use dtsd_core::expr::{check_regular, parse_static_with, print_static, Expr};
use dtsd_core::iso::{find_iso, validate_witness};
use dtsd_core::lts::{state_name, Lts};
use dtsd_core::markov::{self, ChainModel, PhiRoutes, Pmf, QueryFile, Sojourn, SteadyState};
use dtsd_core::net::{box_of_static, build_rg_from, mark_initial, DtsdBox};
use dtsd_core::opsem::build_ts_with_budget;
use dtsd_core::rational::{fmt_q, parse_rational};
use dtsd_core::Q;

use crate::output::{display_lts, lts_csv};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{context}: {source}")]
    Core { context: String, source: dtsd_core::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core { source, .. } if !source.is_user_error() => 2,
            CliError::Mismatch(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "dtsd", version, about = "Semantics, nets and Markov analysis of dtsdPBC expressions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Echo the canonical form and report regularity.
    Parse(Common),
    /// Build the transition system of the expression.
    Ts(Common),
    /// Build the dtsd-box of the expression.
    Box(Common),
    /// Build the reachability graph of the expression's box.
    Rg(Common),
    /// Check that the transition system and reachability graph are isomorphic.
    CheckIso(Common),
    /// Embedded DTMC, sojourn times and the SMC steady state.
    Smc(Common),
    /// DTMC and its steady state.
    Dtmc(Common),
    /// Reduced DTMC (vanishing states eliminated) and its steady state.
    Rdtmc(Common),
    /// Evaluate performance indices listed in a query file.
    Indices {
        #[command(flatten)]
        common: Common,
        /// TOML file of `[[index]]` queries.
        #[arg(long)]
        query: PathBuf,
    },
    /// k-step PMF of a chain from the initial state.
    Transient {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = ChainChoice::Rdtmc)]
        chain: ChainChoice,
    },
    /// Full pipeline summary with the three-route steady-state agreement check.
    Report(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Expression file (`-` for standard input).
    pub input: PathBuf,
    /// Parameter binding `name=rational`, substituted for `$name`.
    #[arg(short = 'p', long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Maximum number of explored states.
    #[arg(long, env = "DTSD_BUDGET", default_value_t = dtsd_core::DEFAULT_BUDGET)]
    pub budget: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChainChoice {
    Dtmc,
    Edtmc,
    Rdtmc,
}

fn read(path: &Path) -> Result<String> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin()).map_err(io)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

fn bindings(raw: &[String]) -> Result<HashMap<String, Q>> {
    let mut out = HashMap::new();
    for b in raw {
        let (name, value) =
            b.split_once('=').ok_or_else(|| CliError::Usage(format!("parameter `{b}` is not NAME=VALUE")))?;
        let name = name.trim().trim_start_matches('$').to_string();
        if name.is_empty() {
            return Err(CliError::Usage(format!("parameter `{b}` has an empty name")));
        }
        let value =
            parse_rational(value).map_err(|source| CliError::Core { context: format!("parameter {name}"), source })?;
        if out.insert(name.clone(), value).is_some() {
            return Err(CliError::Usage(format!("parameter `{name}` bound more than once")));
        }
    }
    Ok(out)
}

fn unsupported(cmd: &str, f: Format) -> CliError {
    CliError::Usage(format!("`{cmd}` does not support --format {f:?}").to_lowercase())
}

/// Parsed input plus the context used to prefix errors.
struct Input {
    expr: Expr,
    ctx: String,
    budget: usize,
}

impl Input {
    fn load(c: &Common) -> Result<Self> {
        if c.budget == 0 {
            return Err(CliError::Usage("budget must be positive".into()));
        }
        let text = read(&c.input)?;
        let params = bindings(&c.params)?;
        let ctx = c.input.display().to_string();
        let expr =
            parse_static_with(&text, &params).map_err(|source| CliError::Core { context: ctx.clone(), source })?;
        Ok(Input { expr, ctx, budget: c.budget })
    }

    fn wrap<T>(&self, r: dtsd_core::Result<T>) -> Result<T> {
        r.map_err(|source| CliError::Core { context: self.ctx.clone(), source })
    }

    fn ts(&self) -> Result<Lts> {
        Ok(self.wrap(build_ts_with_budget(&self.expr, self.budget))?.lts)
    }

    fn dtsd_box(&self) -> Result<DtsdBox> {
        self.wrap(box_of_static(&self.expr))
    }

    fn rg(&self) -> Result<Lts> {
        let n = self.dtsd_box()?;
        Ok(self.wrap(build_rg_from(&n, mark_initial(&n), self.budget))?.lts)
    }
}

fn pretty(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn lts_out(cmd: &str, lts: &Lts, f: Format) -> String {
    match f {
        Format::Json => pretty(lts.to_json()),
        Format::Dot => display_lts(lts).to_dot(cmd),
        Format::Csv => lts_csv(lts),
        Format::Text => display_lts(lts).to_text(),
    }
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Parse(c) => parse(c),
        Command::Ts(c) => {
            let input = Input::load(c)?;
            Ok(lts_out("ts", &input.ts()?, c.format))
        }
        Command::Box(c) => {
            let input = Input::load(c)?;
            let n = input.dtsd_box()?;
            match c.format {
                Format::Json => Ok(pretty(n.to_json())),
                Format::Dot => Ok(n.to_dot("box", Some(&mark_initial(&n).marking))),
                Format::Text => Ok(box_text(&n)),
                Format::Csv => Err(unsupported("box", c.format)),
            }
        }
        Command::Rg(c) => {
            let input = Input::load(c)?;
            Ok(lts_out("rg", &input.rg()?, c.format))
        }
        Command::CheckIso(c) => check_iso(c),
        Command::Smc(c) => smc(c),
        Command::Dtmc(c) => chain_cmd(c, ChainChoice::Dtmc),
        Command::Rdtmc(c) => chain_cmd(c, ChainChoice::Rdtmc),
        Command::Indices { common, query } => indices(common, query),
        Command::Transient { common, steps, chain } => transient(common, *steps, *chain),
        Command::Report(c) => report(c),
    }
}

fn parse(c: &Common) -> Result<String> {
    let input = Input::load(c)?;
    let canonical = print_static(&input.expr);
    let reg = check_regular(&input.expr);
    match c.format {
        Format::Json => Ok(pretty(json!({
            "canonical": canonical,
            "regular": reg.regular,
            "message": reg.message,
            "path": reg.path,
        }))),
        Format::Text => {
            let status = if reg.regular { "regular".to_string() } else { format!("not regular: {}", reg.message) };
            Ok(format!("{canonical}\n{status}\n"))
        }
        f => Err(unsupported("parse", f)),
    }
}

fn box_text(n: &DtsdBox) -> String {
    let mut out = format!("{} places, {} transitions\n", n.places.len(), n.transitions.len());
    for (i, p) in n.places.iter().enumerate() {
        let _ = writeln!(out, "  p{} {} [{}]", i + 1, p.name, p.kind.symbol());
    }
    for t in &n.transitions {
        let pre: Vec<String> = t.pre.keys().map(|p| format!("p{}", p + 1)).collect();
        let post: Vec<String> = t.post.keys().map(|p| format!("p{}", p + 1)).collect();
        let _ = writeln!(
            out,
            "  {} {} : {{{}}} -> {{{}}}",
            t.name(),
            dtsd_core::expr::print_activity(&t.activity),
            pre.join(","),
            post.join(",")
        );
    }
    out
}

fn check_iso(c: &Common) -> Result<String> {
    let input = Input::load(c)?;
    let ts = input.ts()?;
    let rg = input.rg()?;
    match find_iso(&ts, &rg) {
        Ok(w) => {
            validate_witness(&ts, &rg, &w).map_err(|e| CliError::Mismatch(format!("witness rejected: {e}")))?;
            match c.format {
                Format::Json => Ok(pretty(json!({ "isomorphic": true, "states": ts.len(), "witness": w.to_json() }))),
                Format::Text => Ok(format!("isomorphic ({} states)\n", ts.len())),
                f => Err(unsupported("check-iso", f)),
            }
        }
        Err(why) => Err(CliError::Mismatch(format!(
            "transition system ({} states) and reachability graph ({} states) are not isomorphic: {why}",
            ts.len(),
            rg.len()
        ))),
    }
}

fn sojourn_rows(lts: &Lts, soj: &Sojourn) -> Vec<serde_json::Value> {
    (0..lts.len())
        .map(|s| {
            json!({
                "state": state_name(s),
                "tag": lts.states[s].tag,
                "sj": soj.sj[s].to_string(),
                "var": soj.var[s].to_string(),
                "sl": fmt_q(&soj.sl[s]),
            })
        })
        .collect()
}

fn sojourn_text(lts: &Lts, soj: &Sojourn) -> String {
    let mut out = String::from("state tag SJ VAR SL\n");
    for s in 0..lts.len() {
        let _ = writeln!(
            out,
            "{} {:?} {} {} {}",
            state_name(s),
            lts.states[s].tag,
            soj.sj[s],
            soj.var[s],
            fmt_q(&soj.sl[s])
        );
    }
    out
}

fn steady_json(st: &SteadyState) -> serde_json::Value {
    let class: Vec<String> = st.closed_class.iter().map(|&s| state_name(s)).collect();
    json!({ "pmf": st.pmf.to_json(), "closed_class": class, "period": st.period })
}

fn steady_text(name: &str, st: &SteadyState) -> String {
    let class: Vec<String> = st.closed_class.iter().map(|&s| state_name(s)).collect();
    let mut out = format!("{name}: {}\n", st.pmf.to_text());
    let _ = writeln!(out, "closed class {{{}}}, period {}", class.join(","), st.period);
    if st.period > 1 {
        out.push_str("(periodic: stationary but not limiting distribution)\n");
    }
    out
}

fn core<T>(ctx: &str, r: dtsd_core::Result<T>) -> Result<T> {
    r.map_err(|source| CliError::Core { context: ctx.to_string(), source })
}

fn smc(c: &Common) -> Result<String> {
    let input = Input::load(c)?;
    let lts = input.ts()?;
    let (chain, soj) = markov::edtmc(&lts);
    core(&input.ctx, chain.validate())?;
    let psi = core(&input.ctx, markov::steady_state(&chain))?;
    let phi = core(&input.ctx, markov::smc_pmf(&lts))?;
    match c.format {
        Format::Json => Ok(pretty(json!({
            "edtmc": chain.to_json(),
            "sojourn": sojourn_rows(&lts, &soj),
            "psi_star": steady_json(&psi),
            "phi": phi.to_json(),
        }))),
        Format::Csv => Ok(chain.to_csv()),
        Format::Text => Ok(format!(
            "{}{}{}phi: {}\n",
            chain.to_text(),
            sojourn_text(&lts, &soj),
            steady_text("psi*", &psi),
            phi.to_text()
        )),
        f => Err(unsupported("smc", f)),
    }
}

fn build_chain(ctx: &str, lts: &Lts, which: ChainChoice) -> Result<ChainModel> {
    let chain = match which {
        ChainChoice::Dtmc => markov::dtmc(lts),
        ChainChoice::Edtmc => markov::edtmc(lts).0,
        ChainChoice::Rdtmc => core(ctx, markov::rdtmc(lts))?,
    };
    core(ctx, chain.validate())?;
    Ok(chain)
}

fn chain_cmd(c: &Common, which: ChainChoice) -> Result<String> {
    let input = Input::load(c)?;
    let lts = input.ts()?;
    let chain = build_chain(&input.ctx, &lts, which)?;
    let st = core(&input.ctx, markov::steady_state(&chain))?;
    let phi = core(
        &input.ctx,
        match which {
            ChainChoice::Rdtmc => markov::smc_pmf_via_rdtmc(&lts),
            _ => markov::smc_pmf_via_dtmc(&lts),
        },
    )?;
    let psi_name = if which == ChainChoice::Rdtmc { "psi_diamond" } else { "psi" };
    match c.format {
        Format::Json => Ok(pretty(json!({
            "chain": chain.to_json(),
            psi_name: steady_json(&st),
            "phi": phi.to_json(),
        }))),
        Format::Csv => Ok(chain.to_csv()),
        Format::Text => Ok(format!("{}{}phi: {}\n", chain.to_text(), steady_text(psi_name, &st), phi.to_text())),
        f => Err(unsupported("chain", f)),
    }
}

fn indices(c: &Common, query: &Path) -> Result<String> {
    let text = read(query)?;
    let qf: QueryFile = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {}", query.display(), e.to_string().trim_end())))?;
    if qf.index.is_empty() {
        return Err(CliError::Usage(format!("{}: no [[index]] entries", query.display())));
    }
    let input = Input::load(c)?;
    let lts = input.ts()?;
    let soj = markov::sojourn(&lts);
    let phi = core(&input.ctx, PhiRoutes::compute(&lts).agreed())?;
    let mut results = Vec::new();
    for q in &qf.index {
        let v = core(&q.describe(), markov::evaluate(&lts, &phi, &soj, q))?;
        results.push((q.describe(), v));
    }
    match c.format {
        Format::Text => Ok(results.iter().map(|(_, v)| format!("{}\n", fmt_q(v))).collect()),
        Format::Csv => {
            let mut out = String::from("index,value\n");
            for (d, v) in &results {
                let _ = writeln!(out, "\"{}\",{}", d.replace('"', "\"\""), fmt_q(v));
            }
            Ok(out)
        }
        Format::Json => {
            Ok(pretty(json!(results.iter().map(|(d, v)| json!({ "index": d, "value": fmt_q(v) })).collect::<Vec<_>>())))
        }
        f => Err(unsupported("indices", f)),
    }
}

fn transient(c: &Common, steps: usize, which: ChainChoice) -> Result<String> {
    let input = Input::load(c)?;
    let lts = input.ts()?;
    let chain = build_chain(&input.ctx, &lts, which)?;
    let pmf = markov::transient(&chain, steps);
    pmf_out("transient", &pmf, c.format)
}

fn pmf_out(cmd: &str, pmf: &Pmf, f: Format) -> Result<String> {
    match f {
        Format::Json => Ok(pretty(pmf.to_json())),
        Format::Csv => Ok(pmf.to_csv()),
        Format::Text => Ok(format!("{}\n", pmf.to_text())),
        f => Err(unsupported(cmd, f)),
    }
}

fn route_text(name: &str, r: &dtsd_core::Result<Pmf>) -> String {
    match r {
        Ok(p) => format!("phi via {name}: {}\n", p.to_text()),
        Err(e) => format!("phi via {name}: unavailable ({e})\n"),
    }
}

fn route_json(r: &dtsd_core::Result<Pmf>) -> serde_json::Value {
    match r {
        Ok(p) => p.to_json(),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn report(c: &Common) -> Result<String> {
    let input = Input::load(c)?;
    let lts = input.ts()?;
    let soj = markov::sojourn(&lts);
    let routes = PhiRoutes::compute(&lts);
    let agreed = routes.agreed();
    if let Err(e @ dtsd_core::Error::Internal(_)) = &agreed {
        return Err(CliError::Mismatch(format!("{}: {e}", input.ctx)));
    }
    let aggregate = agreed.as_ref().ok().map(|phi| markov::timer_free_aggregate(&lts, phi, &soj));
    let tags = lts.tags();
    let count = |t| tags.iter().filter(|&&x| x == t).count();
    use dtsd_core::lts::Tag;
    match c.format {
        Format::Json => Ok(pretty(json!({
            "states": lts.len(),
            "transitions": lts.transitions.len(),
            "tags": { "ST": count(Tag::ST), "WT": count(Tag::WT), "V": count(Tag::V) },
            "sojourn": sojourn_rows(&lts, &soj),
            "phi_via_edtmc": route_json(&routes.via_edtmc),
            "phi_via_dtmc": route_json(&routes.via_dtmc),
            "phi_via_rdtmc": route_json(&routes.via_rdtmc),
            "agreement": agreed.is_ok(),
            "timer_free": aggregate,
        }))),
        Format::Text => {
            let mut out = format!(
                "{} states ({} ST, {} WT, {} V), {} transitions\n",
                lts.len(),
                count(Tag::ST),
                count(Tag::WT),
                count(Tag::V),
                lts.transitions.len()
            );
            out.push_str(&sojourn_text(&lts, &soj));
            out.push_str(&route_text("EDTMC", &routes.via_edtmc));
            out.push_str(&route_text("DTMC", &routes.via_dtmc));
            out.push_str(&route_text("RDTMC", &routes.via_rdtmc));
            match &agreed {
                Ok(_) => out.push_str("agreement: all available routes give identical phi\n"),
                Err(e) => {
                    let _ = writeln!(out, "agreement: no route available ({e})");
                }
            }
            if let Some(rows) = aggregate {
                out.push_str("timer-free aggregation:\n");
                for r in rows {
                    let members: Vec<String> = r.members.iter().map(|&s| state_name(s)).collect();
                    let _ =
                        writeln!(out, "  {{{}}} SJ={} VAR={} phi={}", members.join(","), r.sj, r.var, fmt_q(&r.phi));
                }
            }
            Ok(out)
        }
        f => Err(unsupported("report", f)),
    }
}
