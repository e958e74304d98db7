use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use dirparadox::graph::{self, CoreReport, EdgeListConfig, LoadedGraph, UnknownNodePolicy};
use dirparadox::paradox::{self, Binning, Variant};
use dirparadox::perception::{self, BiasReport, RankKey, ZeroFriendPolicy};
use dirparadox::polling::{self, PollMethod, PollSpec};
use dirparadox::spectral::{EigenOptions, SpectralAnalysis};
use dirparadox::stats;
use dirparadox::synth::{self, AttributeSuite, Coupling, DegreeLaw, GraphRecipe};
use dirparadox::{AttributeSet, DirectedGraph};
use serde_json::json;

use crate::args::*;
use crate::output::{fmt_float as f, Meta, Report, Table};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core {
        op: &'static str,
        error: dirparadox::Error,
    },
    Io {
        op: &'static str,
        path: String,
        error: std::io::Error,
    },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core { error, .. } if error.is_numerical() => 3,
            Failure::Core { .. } | Failure::Io { .. } => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(fmt, "usage: {msg}"),
            Failure::Core { op, error } => write!(fmt, "{op}: {error}"),
            Failure::Io { op, path, error } => write!(fmt, "{op}: {path}: {error}"),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn at(op: &'static str) -> impl FnOnce(dirparadox::Error) -> Failure {
    move |error| Failure::Core { op, error }
}

fn io_at<'p>(op: &'static str, path: &'p Path) -> impl FnOnce(std::io::Error) -> Failure + 'p {
    move |error| Failure::Io {
        op,
        path: path.display().to_string(),
        error,
    }
}

struct Inputs {
    loaded: LoadedGraph,
    attrs: Option<AttributeSet>,
    skipped_unknown: usize,
}

impl Inputs {
    fn graph(&self) -> &DirectedGraph {
        &self.loaded.graph
    }

    fn attrs(&self) -> Outcome<&AttributeSet> {
        self.attrs
            .as_ref()
            .ok_or_else(|| Failure::Usage("this subcommand needs --attrs".into()))
    }

    fn note(&self) -> String {
        let d = self.loaded.dropped;
        let mut s = format!(
            "graph: {} nodes, {} links ({} duplicate, {} self-loop lines dropped)",
            self.graph().node_count(),
            self.graph().edge_count(),
            d.duplicates,
            d.self_loops
        );
        if let Some(a) = &self.attrs {
            s.push_str(&format!(
                "\nattributes: {} ({} unknown members skipped)",
                a.len(),
                self.skipped_unknown
            ));
        }
        s
    }
}

fn load(global: &Global) -> Outcome<Inputs> {
    let path = global
        .edges
        .as_deref()
        .ok_or_else(|| Failure::Usage("--edges is required".into()))?;
    let file = File::open(path).map_err(io_at("graph::load_edge_list", path))?;
    let loaded =
        graph::load_edge_list(BufReader::new(file), &EdgeListConfig::default()).map_err(at("graph::load_edge_list"))?;
    let (attrs, skipped_unknown) = match &global.attrs {
        None => (None, 0),
        Some(path) => {
            let file = File::open(path).map_err(io_at("graph::load_attributes", path))?;
            let policy = if global.skip_unknown {
                UnknownNodePolicy::Skip
            } else {
                UnknownNodePolicy::Error
            };
            let la = graph::load_attributes(BufReader::new(file), &loaded.graph, policy)
                .map_err(at("graph::load_attributes"))?;
            (Some(la.attributes), la.skipped_unknown)
        }
    };
    Ok(Inputs {
        loaded,
        attrs,
        skipped_unknown,
    })
}

fn select(attrs: &AttributeSet, name: Option<&str>) -> Outcome<AttributeSet> {
    match name {
        None => Ok(attrs.clone()),
        Some(name) => {
            let attr = attrs.require(name).map_err(at("graph::attributes"))?;
            let mut one = AttributeSet::new(attrs.node_count());
            one.insert(attr.clone());
            Ok(one)
        }
    }
}

/// Everything that determines the output, minus workers and output paths.
fn config_string(cli: &Cli) -> String {
    let g = &cli.global;
    format!(
        "{:?}|edges={:?}|attrs={:?}|format={:?}|seed={}|skip_unknown={}",
        cli.command, g.edges, g.attrs, g.format, g.seed, g.skip_unknown
    )
}

pub fn run(cli: &Cli) -> Outcome<Report> {
    let g = &cli.global;
    let meta = || Meta::new(g.seed, &config_string(cli));
    match &cli.command {
        Command::Stats => stats_cmd(&load(g)?),
        Command::Paradox => paradox_cmd(&load(g)?),
        Command::Curve(a) => curve_cmd(&load(g)?, a),
        Command::Bias(a) => bias_cmd(&load(g)?, a),
        Command::Rank(a) => rank_cmd(&load(g)?, a),
        Command::Poll(a) => Ok(poll_cmd(&load(g)?, a, g.seed)?.with_meta(meta())),
        Command::Compare(a) => Ok(compare_cmd(&load(g)?, a, g.seed, &meta())?.with_meta(meta())),
        Command::Spectral(a) => Ok(spectral_cmd(&load(g)?, a, g.seed)?.with_meta(meta())),
        Command::Synth(a) => Ok(synth_cmd(a, g.seed)?.with_meta(meta())),
        Command::Core(a) => core_cmd(&load(g)?, a),
    }
}

fn stats_cmd(inputs: &Inputs) -> Outcome<Report> {
    let s = graph::degree_summary(inputs.graph());
    let mut t = Table::new("n,m,mean_degree,var_out,var_in,cov_in_out,corr_in_out");
    t.push(vec![
        s.n.to_string(),
        s.m.to_string(),
        f(s.mean_degree),
        f(s.var_out),
        f(s.var_in),
        f(s.cov_in_out),
        f(s.corr_in_out),
    ]);
    let summary = format!(
        "{}\nmean degree {}, var out {}, var in {}, cov {}, corr {}",
        inputs.note(),
        f(s.mean_degree),
        f(s.var_out),
        f(s.var_in),
        f(s.cov_in_out),
        f(s.corr_in_out)
    );
    Ok(Report::new(s, t, summary))
}

fn paradox_cmd(inputs: &Inputs) -> Outcome<Report> {
    let r = paradox::paradox_gaps(inputs.graph()).map_err(at("paradox::paradox_gaps"))?;
    let mut t = Table::new("gap,closed_form,direct,neighbour_mean");
    let rows = [
        ("out_friend", r.out_friend),
        ("in_follower", r.in_follower),
        ("in_friend", r.in_friend),
        ("out_follower", r.out_follower),
    ];
    let mut summary = format!("{}\nmean degree {}", inputs.note(), f(r.mean_degree));
    for (name, gap) in rows {
        t.push(vec![
            name.into(),
            f(gap.closed_form),
            f(gap.direct),
            f(r.mean_degree + gap.closed_form),
        ]);
        summary.push_str(&format!(
            "\n{name:>12}: gap {} (neighbour mean {})",
            f(gap.closed_form),
            f(r.mean_degree + gap.closed_form)
        ));
    }
    Ok(Report::new(r, t, summary))
}

fn curve_cmd(inputs: &Inputs, a: &CurveArgs) -> Outcome<Report> {
    let variant = match a.variant {
        VariantArg::FriendsMoreFollowers => Variant::FriendsMoreFollowers,
        VariantArg::FollowersMoreFriends => Variant::FollowersMoreFriends,
        VariantArg::FriendsMoreFriends => Variant::FriendsMoreFriends,
        VariantArg::FollowersMoreFollowers => Variant::FollowersMoreFollowers,
    };
    let binning = Binning {
        bins_per_decade: a.per_decade,
    };
    let c = paradox::paradox_curve(inputs.graph(), variant, &binning).map_err(at("paradox::paradox_curve"))?;
    let mut t = Table::new("variant,bin_lo,bin_hi,n_nodes,fraction");
    for b in &c.bins {
        t.push(vec![
            variant.name().into(),
            f(b.bin_lo),
            f(b.bin_hi),
            b.n_nodes.to_string(),
            f(b.fraction),
        ]);
    }
    let summary = format!(
        "{}\n{}: {} of {} eligible nodes experience the paradox ({})",
        inputs.note(),
        variant.name(),
        c.experiencing,
        c.eligible,
        f(c.overall_fraction())
    );
    Ok(Report::new(c, t, summary))
}

fn histogram_report(kind: &str, attribute: Option<&str>, values: &[f64], bins: u32, note: String) -> Report {
    let hist = stats::auto_histogram(values, bins as usize);
    let mut t = Table::new("bin_lo,bin_hi,count");
    for b in &hist {
        t.push(vec![f(b.bin_lo), f(b.bin_hi), b.count.to_string()]);
    }
    let summary = format!(
        "{note}\n{kind} histogram over {} values in {} bins",
        values.len(),
        hist.len()
    );
    Report::new(
        json!({ "kind": kind, "attribute": attribute, "bins": hist }),
        t,
        summary,
    )
}

fn bias_cmd(inputs: &Inputs, a: &BiasArgs) -> Outcome<Report> {
    let graph = inputs.graph();
    let attrs = select(inputs.attrs()?, a.attr.as_deref())?;
    if let Some(HistogramKind::Individual) = a.histogram {
        let name = a
            .attr
            .as_deref()
            .ok_or_else(|| Failure::Usage("--histogram individual needs --attr".into()))?;
        let ib = perception::individual_bias(graph, attrs.require(name).map_err(at("graph::attributes"))?);
        let values: Vec<f64> = ib.defined().collect();
        let note = format!(
            "{}\n{name}: {} nodes perceive more than the prevalence, {} less, {} exactly",
            inputs.note(),
            ib.n_positive,
            ib.n_negative,
            ib.n_zero
        );
        return Ok(histogram_report("individual", Some(name), &values, a.bins, note));
    }
    let policy = match a.zero_friends {
        ZeroFriends::Exclude => ZeroFriendPolicy::Exclude,
        ZeroFriends::TreatAsZero => ZeroFriendPolicy::TreatAsZero,
    };
    let reports = perception::bias_reports(graph, &attrs, policy).map_err(at("perception::bias_report"))?;
    if let Some(kind) = a.histogram {
        let (name, pick): (&str, fn(&BiasReport) -> f64) = match kind {
            HistogramKind::Prevalence => ("prevalence", |r| r.global_prevalence),
            HistogramKind::GlobalBias => ("global-bias", |r| r.b_global),
            HistogramKind::LocalBias => ("local-bias", |r| r.b_local),
            HistogramKind::Individual => unreachable!("handled above"),
        };
        let values: Vec<f64> = reports.iter().map(pick).collect();
        return Ok(histogram_report(
            name,
            a.attr.as_deref(),
            &values,
            a.bins,
            inputs.note(),
        ));
    }
    let mut t = Table::new(BiasReport::CSV_HEADER);
    for r in &reports {
        let mut row = vec![r.attribute.clone()];
        row.extend(r.csv_values().iter().map(|&x| f(x)));
        row.push(r.n_excluded.to_string());
        t.push(row);
    }
    let mut summary = inputs.note();
    for r in reports.iter().take(10) {
        summary.push_str(&format!(
            "\n{}: prevalence {}, B_global {}, B_local {}{}",
            r.attribute,
            f(r.global_prevalence),
            f(r.b_global),
            f(r.b_local),
            if r.edge_identity_applicable() {
                ""
            } else {
                " (edge identity not applicable)"
            }
        ));
    }
    if reports.len() > 10 {
        summary.push_str(&format!("\n... {} more", reports.len() - 10));
    }
    Ok(Report::new(reports, t, summary))
}

fn rank_cmd(inputs: &Inputs, a: &RankArgs) -> Outcome<Report> {
    let key = match a.key {
        KeyArg::Local => RankKey::Local,
        KeyArg::Global => RankKey::Global,
    };
    let ranked = perception::rank_attributes(inputs.graph(), inputs.attrs()?, key, a.top, a.bottom)
        .map_err(at("perception::rank_attributes"))?;
    let mut t = Table::new("rank,section,attribute,key_value,global_prevalence,perceived,b_global,b_local");
    let mut summary = inputs.note();
    for r in &ranked {
        let section = serde_json::to_value(r.section).expect("section serializes");
        t.push(vec![
            r.rank.to_string(),
            section.as_str().unwrap_or_default().to_owned(),
            r.attribute.clone(),
            f(r.key_value),
            f(r.global_prevalence),
            f(r.perceived),
            f(r.b_global),
            f(r.b_local),
        ]);
        summary.push('\n');
        summary.push_str(&r.render());
    }
    Ok(Report::new(ranked, t, summary))
}

fn method(m: MethodArg) -> PollMethod {
    match m {
        MethodArg::Ip => PollMethod::Ip,
        MethodArg::Npp => PollMethod::Npp,
        MethodArg::Fpp => PollMethod::Fpp,
        MethodArg::FppUnbiased => PollMethod::FppUnbiased,
    }
}

fn poll_cmd(inputs: &Inputs, a: &PollArgs, seed: u64) -> Outcome<Report> {
    let graph = inputs.graph();
    let attr = inputs.attrs()?.require(&a.attr).map_err(at("graph::attributes"))?;
    let spec = PollSpec {
        method: method(a.method),
        budget: a.budget,
        seed,
    };
    let e = polling::evaluate(graph, attr, &spec, a.trials).map_err(at("polling::evaluate"))?;
    let exact = if graph.node_count() <= a.exact_threshold {
        Some(polling::exact_evaluation(graph, attr, spec.method, a.budget).map_err(at("polling::exact_evaluation"))?)
    } else {
        None
    };
    let mut t = Table::new(
        "method,attribute,budget,trials,target,mean_estimate,bias,variance,mse,excluded_respondents,exact_bias,exact_variance,exact_mse",
    );
    let exact_cols = match &exact {
        Some(x) => vec![f(x.bias), f(x.variance), f(x.mse)],
        None => vec![String::new(); 3],
    };
    let mut row = vec![
        e.method.name().into(),
        e.attribute.clone(),
        e.budget.to_string(),
        e.trials.to_string(),
        f(e.target),
        f(e.mean_estimate),
        f(e.bias),
        f(e.variance),
        f(e.mse),
        e.excluded_respondents.to_string(),
    ];
    row.extend(exact_cols);
    t.push(row);
    let mut summary = format!(
        "{}\n{} on {} with b={} over {} trials: estimate {} (target {}), bias {}, variance {}, MSE {}",
        inputs.note(),
        e.method,
        e.attribute,
        e.budget,
        e.trials,
        f(e.mean_estimate),
        f(e.target),
        f(e.bias),
        f(e.variance),
        f(e.mse)
    );
    if e.excluded_respondents > 0 {
        summary.push_str(&format!(
            "\n{} nodes without friends excluded from the respondent pool",
            e.excluded_respondents
        ));
    }
    if let Some(x) = &exact {
        summary.push_str(&format!(
            "\nexact: bias {}, variance {}, MSE {}",
            f(x.bias),
            f(x.variance),
            f(x.mse)
        ));
    }
    Ok(Report::new(json!({ "evaluation": e, "exact": exact }), t, summary))
}

fn evaluation_table(evaluations: &[polling::PollEvaluation]) -> Table {
    let mut t = Table::new("budget,attribute,method,target,mean_estimate,bias,variance,mse");
    for e in evaluations {
        t.push(vec![
            e.budget.to_string(),
            e.attribute.clone(),
            e.method.name().into(),
            f(e.target),
            f(e.mean_estimate),
            f(e.bias),
            f(e.variance),
            f(e.mse),
        ]);
    }
    t
}

fn compare_cmd(inputs: &Inputs, a: &CompareArgs, seed: u64, meta: &Meta) -> Outcome<Report> {
    let c = polling::compare_methods(inputs.graph(), inputs.attrs()?, &a.budgets, a.trials, seed)
        .map_err(at("polling::compare"))?;
    if let Some(path) = &a.details {
        let text = evaluation_table(&c.evaluations).render(Some(meta));
        std::fs::write(path, text).map_err(io_at("cli::write_details", path))?;
    }
    let mut t = Table::new("budget,method_pair,win_fraction,n_attrs");
    let mut summary = inputs.note();
    for r in &c.rows {
        t.push(vec![
            r.budget.to_string(),
            r.method_pair.clone(),
            f(r.win_fraction),
            r.n_attrs.to_string(),
        ]);
        summary.push_str(&format!(
            "\nb={}: {} win fraction {} over {} attributes",
            r.budget,
            r.method_pair,
            f(r.win_fraction),
            r.n_attrs
        ));
    }
    Ok(Report::new(json!({ "rows": c.rows }), t, summary))
}

fn spectral_cmd(inputs: &Inputs, a: &SpectralArgs, seed: u64) -> Outcome<Report> {
    let graph = inputs.graph();
    let attrs = select(inputs.attrs()?, a.attr.as_deref())?;
    let options = EigenOptions {
        tolerance: a.tol,
        max_iters: a.max_iters,
        seed,
    };
    let analysis = SpectralAnalysis::new(graph, &options).map_err(at("spectral::lambda2"))?;
    let summaries = attrs
        .iter()
        .map(|attr| analysis.summary(graph, attr, a.budget))
        .collect::<dirparadox::Result<Vec<_>>>()
        .map_err(at("spectral::variance_bound"))?;
    let mut t = Table::new(
        "attribute,budget,lambda2,iters,exact_variance,upper_bound,bd_connected,bd_nonbipartite,removed_nodes",
    );
    for s in &summaries {
        t.push(vec![
            s.attribute.clone(),
            s.budget.to_string(),
            f(s.lambda2),
            s.iters.to_string(),
            f(s.exact_variance),
            f(s.upper_bound),
            s.bd_connected.to_string(),
            s.bd_nonbipartite.to_string(),
            s.removed_nodes.to_string(),
        ]);
    }
    let mut summary = format!(
        "{}\nlambda2 {} after {} iterations; coupling support connected: {}, non-bipartite: {}",
        inputs.note(),
        f(analysis.lambda2.lambda2),
        analysis.lambda2.iters,
        analysis.bd_connected,
        analysis.bd_nonbipartite
    );
    if !analysis.bd_connected {
        summary.push_str(
            "\nnote: the coupling support is disconnected, so the bound's premise fails; it is reported anyway",
        );
    }
    Ok(Report::new(summaries, t, summary))
}

fn range(v: &[f64], flag: &str) -> Outcome<(f64, f64)> {
    match v {
        [lo, hi] if lo <= hi => Ok((*lo, *hi)),
        _ => Err(Failure::Usage(format!("{flag} takes LO,HI with LO <= HI"))),
    }
}

fn synth_cmd(a: &SynthArgs, seed: u64) -> Outcome<Report> {
    let law = match a.law {
        LawArg::Regular => DegreeLaw::Regular { degree: a.degree },
        LawArg::Powerlaw => DegreeLaw::PowerLaw {
            exponent: a.exponent,
            min_degree: a.min_degree,
            max_degree: a.max_degree,
        },
    };
    let coupling = match a.coupling {
        CouplingArg::Independent => Coupling::Independent,
        CouplingArg::Identical => Coupling::Identical,
        CouplingArg::Correlated => Coupling::Correlated(a.degree_correlation),
    };
    if a.n_attrs > 0 && a.attrs_out.is_none() {
        return Err(Failure::Usage("--n-attrs needs --attrs-out".into()));
    }
    let prevalence = range(&a.prevalence_range, "--prevalence-range")?;
    let correlation = range(&a.rho_range, "--rho-range")?;
    let recipe = GraphRecipe {
        nodes: a.nodes,
        law,
        coupling,
        seed,
    };
    let generated = synth::generate_graph(&recipe).map_err(at("synth::generate_graph"))?;
    let mut graph = generated.graph;
    // isolated nodes cannot be written to an edge list
    let linked: Vec<bool> = (0..graph.node_count())
        .map(|v| graph.in_degree(v) + graph.out_degree(v) > 0)
        .collect();
    let isolated_removed = linked.iter().filter(|&&k| !k).count();
    if isolated_removed > 0 {
        graph = graph.induced(&linked);
    }
    let mut core_removed = 0;
    if a.core {
        let core = graph::nonzero_core(&graph);
        core_removed = core.removed.len();
        graph = core.graph;
    }
    let suite = AttributeSuite {
        count: a.n_attrs,
        prevalence,
        correlation,
        seed: seed ^ 0xa77e_5eed,
    };
    let planted = synth::plant_suite(&graph, &suite).map_err(at("synth::plant_attribute"))?;

    write_with(&a.edges_out, "synth::write_edge_list", |w| {
        graph::write_edge_list(&graph, w)
    })?;
    let mut t = Table::new("attribute,prevalence,realized_correlation,tilt");
    let mut attrs_json = Vec::new();
    for p in &planted {
        t.push(vec![
            p.attribute.name().into(),
            f(p.attribute.prevalence()),
            f(p.realized_correlation),
            f(p.tilt),
        ]);
        attrs_json.push(json!({
            "attribute": p.attribute.name(),
            "prevalence": p.attribute.prevalence(),
            "realized_correlation": p.realized_correlation,
            "tilt": p.tilt,
        }));
    }
    if let Some(path) = &a.attrs_out {
        let set = synth::into_attribute_set(graph.node_count(), planted);
        write_with(path, "synth::write_attributes", |w| {
            graph::write_attributes(&graph, &set, w)
        })?;
    }
    let s = graph::degree_summary(&graph);
    let summary = format!(
        "wrote {} nodes and {} links to {} ({} self-loops and {} duplicates erased, {} balancing stubs, {} isolated and {} peeled nodes dropped)\n\
         mean degree {}, var out {}, var in {}, corr {}; {} attributes planted",
        s.n,
        s.m,
        a.edges_out.display(),
        generated.erased.self_loops,
        generated.erased.duplicates,
        generated.balance_increments,
        isolated_removed,
        core_removed,
        f(s.mean_degree),
        f(s.var_out),
        f(s.var_in),
        f(s.corr_in_out),
        attrs_json.len()
    );
    let report = json!({
        "summary": s,
        "erased_self_loops": generated.erased.self_loops,
        "erased_duplicates": generated.erased.duplicates,
        "balance_increments": generated.balance_increments,
        "isolated_removed": isolated_removed,
        "core_removed": core_removed,
        "attributes": attrs_json,
    });
    Ok(Report::new(report, t, summary))
}

fn write_with(
    path: &Path,
    op: &'static str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Outcome<()> {
    let file = File::create(path).map_err(io_at(op, path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(io_at(op, path))
}

fn core_cmd(inputs: &Inputs, a: &CoreArgs) -> Outcome<Report> {
    let CoreReport {
        graph: core,
        removed,
        rounds,
        ..
    } = graph::nonzero_core(inputs.graph());
    write_with(&a.edges_out, "graph::write_edge_list", |w| {
        graph::write_edge_list(&core, w)
    })?;
    let mut t = Table::new("removed");
    for label in &removed {
        t.push(vec![label.clone()]);
    }
    let empty = core.node_count() == 0;
    let summary = format!(
        "{}\ncore: {} nodes, {} links after {} peeling rounds; {} nodes removed{}",
        inputs.note(),
        core.node_count(),
        core.edge_count(),
        rounds,
        removed.len(),
        if empty { " (core is empty)" } else { "" }
    );
    let report = json!({
        "input_nodes": inputs.graph().node_count(),
        "nodes": core.node_count(),
        "links": core.edge_count(),
        "rounds": rounds,
        "empty": empty,
        "removed": removed,
    });
    Ok(Report::new(report, t, summary))
}
