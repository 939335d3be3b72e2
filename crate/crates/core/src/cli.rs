//! The `gis` command line: orbit and group inspection, sub dual systems,
//! octatonic covers, affine morphisms, retrograde dualities, network
//! verification, DOT export, and the bundled figure fixtures.
//!
//! Exit codes: 0 on success or a passing verification, 1 on a verification
//! failure, 2 on usage or domain errors. Results go to stdout, diagnostics
//! to stderr. All output is deterministic for a fixed input.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::contextual::{contextual_group, morphism_from_affine, ti_orbit};
use crate::covers::enumerate_octatonic_covers;
use crate::error::{Error, Result};
use crate::groupcore::{
    close_generators, commute_elementwise, dual_group, is_dihedral_of_order, is_simply_transitive,
    FiniteGroup, Perm,
};
use crate::netio::{
    export_dot, parse_network, serialize_network, verify_network, DotStyle, NetworkDoc, OpExpr,
    ResolvedSystem,
};
use crate::pcmath::{AffineMap, Modulus, PcSegment};
use crate::serial::{build_retro_duality, figures};
use crate::subdual::{build_m7_m10_network, build_sub_dual, OctatonicId};

#[derive(Parser)]
#[command(
    name = "gis",
    version,
    about = "Contextual transformation groups and interval systems over Z_m"
)]
struct Cli {
    /// Chromatic modulus.
    #[arg(
        long,
        short = 'm',
        global = true,
        default_value_t = 12,
        env = "GIS_MODULUS"
    )]
    modulus: u32,
    /// Output format for data commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print progress diagnostics to stderr.
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Print the T/I-orbit of a seed with its T-form/I-form split.
    Orbit {
        #[arg(long)]
        seed: String,
    },
    /// Print the contextual group of a seed's orbit.
    Contextual {
        #[arg(long)]
        seed: String,
    },
    /// Print the dual group of the T/I action on a seed's orbit.
    Dual {
        #[arg(long)]
        seed: String,
    },
    /// Build and verify a sub dual system from subgroup generators.
    Subdual {
        #[arg(long)]
        seed: String,
        /// Comma-separated generators, all T/I-side (e.g. T3,I1) or all
        /// contextual (e.g. P,R).
        #[arg(long)]
        gens: String,
        /// Base chord; defaults to the seed.
        #[arg(long)]
        base: Option<String>,
    },
    /// Check the three-chord covers of an octatonic collection.
    Covers {
        /// Octatonic id: 01, 12 or 23.
        #[arg(long)]
        octatonic: String,
    },
    /// Build and classify the morphism induced by an affine map.
    Morphism {
        #[arg(long = "from-seed")]
        from_seed: String,
        /// Affine map: T<i>, I<j>, M<a> or aff(a,b).
        #[arg(long)]
        map: String,
    },
    /// Summarize the retrograde-refined duality of a seed.
    Retro {
        #[arg(long)]
        seed: String,
    },
    /// Verify a network document; exit 0 iff every check passes.
    CheckNetwork { file: PathBuf },
    /// Render a network document as DOT.
    ExportDot {
        file: PathBuf,
        /// Output path.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write the bundled figure networks as JSON files.
    Fixtures {
        /// Directory to write into.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
}

/// Entry point used by the `gis` binary. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors and 0 for --help.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gis: error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let modulus = Modulus::new(cli.modulus)?;
    if cli.format == Format::Dot && !matches!(cli.command, Command::ExportDot { .. }) {
        return Err(Error::InvalidArgument(
            "format `dot` is only available for export-dot".into(),
        ));
    }
    match &cli.command {
        Command::Orbit { seed } => cmd_orbit(cli, modulus, seed),
        Command::Contextual { seed } => cmd_contextual(cli, modulus, seed),
        Command::Dual { seed } => cmd_dual(cli, modulus, seed),
        Command::Subdual { seed, gens, base } => {
            cmd_subdual(cli, modulus, seed, gens, base.as_deref())
        }
        Command::Covers { octatonic } => cmd_covers(cli, modulus, octatonic),
        Command::Morphism { from_seed, map } => cmd_morphism(cli, modulus, from_seed, map),
        Command::Retro { seed } => cmd_retro(cli, modulus, seed),
        Command::CheckNetwork { file } => cmd_check_network(cli, file),
        Command::ExportDot { file, output } => cmd_export_dot(cli, file, output),
        Command::Fixtures { output } => cmd_fixtures(cli, output),
    }
}

fn parse_seed(text: &str, modulus: Modulus) -> Result<PcSegment> {
    PcSegment::parse(text, modulus)
}

/// Split on commas that are not inside parentheses, so generator lists like
/// `J(1,3),Q1` survive.
fn split_top_level(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                current.push(c);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(c);
            }
            ',' if depth == 0 => {
                out.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out
}

fn emit(cli: &Cli, text: String, value: Value) {
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
        _ => print!("{text}"),
    }
}

fn cmd_orbit(cli: &Cli, modulus: Modulus, seed: &str) -> Result<i32> {
    let seed = parse_seed(seed, modulus)?;
    let orbit = ti_orbit(&seed)?;
    let mut text = format!(
        "T/I-orbit of {seed} (m={modulus}): {} segments\n",
        orbit.len()
    );
    let rows = |forms: &[PcSegment], prefix: char| -> (String, Vec<Value>) {
        let mut block = String::new();
        let mut items = Vec::new();
        for y in forms {
            let (a, b) = orbit.decomposition(y).expect("orbit member");
            let label = if a == 1 {
                format!("T{b}")
            } else {
                format!("I{b}")
            };
            block.push_str(&format!("  {label:<4} {y}\n"));
            items.push(json!({ "op": label, "segment": y.to_string() }));
            debug_assert_eq!(label.chars().next(), Some(prefix));
        }
        (block, items)
    };
    let (t_block, t_items) = rows(&orbit.t_forms(), 'T');
    let (i_block, i_items) = rows(&orbit.i_forms(), 'I');
    text.push_str("T-forms:\n");
    text.push_str(&t_block);
    text.push_str("I-forms:\n");
    text.push_str(&i_block);
    emit(
        cli,
        text,
        json!({
            "seed": seed.to_string(),
            "modulus": modulus.get(),
            "size": orbit.len(),
            "t_forms": t_items,
            "i_forms": i_items,
        }),
    );
    Ok(0)
}

fn contextual_label_sort(group: &FiniteGroup<PcSegment>) -> Vec<Perm> {
    let mut elements = group.elements().to_vec();
    let key = |label: &str| -> (u8, i64) {
        let wechsel = label.contains('K');
        let digits: String = label.chars().filter(|c| c.is_ascii_digit()).collect();
        (u8::from(wechsel), digits.parse().unwrap_or(i64::MAX))
    };
    elements.sort_by_key(|e| key(&e.display_label()));
    elements
}

fn cmd_contextual(cli: &Cli, modulus: Modulus, seed: &str) -> Result<i32> {
    let seed = parse_seed(seed, modulus)?;
    let orbit = ti_orbit(&seed)?;
    let ctx = contextual_group(&orbit);
    let ti = orbit.ti_perm_group();
    let dihedral = is_dihedral_of_order(&ctx, 2 * modulus.get() as usize);
    let transitive = is_simply_transitive(&ctx);
    let dual = dual_group(&ti)? == ctx && commute_elementwise(&ti, &ctx)?;

    let mut text = format!(
        "contextual group of {seed} (m={modulus}): {} elements\n",
        ctx.order()
    );
    let mut items = Vec::new();
    let seed_idx = orbit.carrier().position_or_err(&seed)?;
    for e in contextual_label_sort(&ctx) {
        let image = orbit.carrier().get(e.apply(seed_idx));
        text.push_str(&format!("  {:<6} {seed} -> {image}\n", e.display_label()));
        items.push(json!({ "label": e.display_label(), "seed_image": image.to_string() }));
    }
    text.push_str(&format!(
        "dihedral of order {}: {}\nsimply transitive: {}\ndual to T/I: {}\n",
        2 * modulus.get(),
        yes_no(dihedral),
        yes_no(transitive),
        yes_no(dual)
    ));
    emit(
        cli,
        text,
        json!({
            "seed": seed.to_string(),
            "modulus": modulus.get(),
            "order": ctx.order(),
            "elements": items,
            "dihedral_of_order": 2 * modulus.get(),
            "dihedral": dihedral,
            "simply_transitive": transitive,
            "dual_to_ti": dual,
        }),
    );
    Ok(0)
}

fn cmd_dual(cli: &Cli, modulus: Modulus, seed: &str) -> Result<i32> {
    let seed = parse_seed(seed, modulus)?;
    let orbit = ti_orbit(&seed)?;
    let ti = orbit.ti_perm_group();
    let dual = dual_group(&ti)?;
    let ctx = contextual_group(&orbit);
    let equals_contextual = dual == ctx;

    let mut text = format!(
        "dual of the T/I action on the orbit of {seed} (m={modulus}): {} elements\n",
        dual.order()
    );
    text.push_str(&format!(
        "equals the contextual group <K,Q1>: {}\n",
        yes_no(equals_contextual)
    ));
    let mut items = Vec::new();
    for e in contextual_label_sort(&ctx) {
        if equals_contextual {
            text.push_str(&format!("  {}\n", e.display_label()));
            items.push(Value::String(e.display_label()));
        }
    }
    emit(
        cli,
        text,
        json!({
            "seed": seed.to_string(),
            "modulus": modulus.get(),
            "order": dual.order(),
            "equals_contextual_group": equals_contextual,
            "elements": items,
        }),
    );
    Ok(0)
}

fn cmd_subdual(
    cli: &Cli,
    modulus: Modulus,
    seed: &str,
    gens: &str,
    base: Option<&str>,
) -> Result<i32> {
    let seed = parse_seed(seed, modulus)?;
    let orbit = ti_orbit(&seed)?;
    let gen_texts = split_top_level(gens);
    if gen_texts.is_empty() {
        return Err(Error::InvalidArgument("no generators given".into()));
    }
    let plain = ResolvedSystem::TiOrbit(orbit.clone());
    let mut gen_perms = Vec::new();
    for text in &gen_texts {
        let op = OpExpr::parse(text)?;
        gen_perms.push(orbit.perm_of(text, |y| op.eval(&plain, y))?);
    }
    let ti = orbit.ti_perm_group();
    let ctx = contextual_group(&orbit);
    let (side, parent_g, parent_h) = if gen_perms.iter().all(|g| ti.contains(g)) {
        ("T/I", ti, ctx)
    } else if gen_perms.iter().all(|g| ctx.contains(g)) {
        ("contextual", ctx, ti)
    } else {
        return Err(Error::InvalidArgument(
            "generators must lie entirely in the T/I side or the contextual side".into(),
        ));
    };
    let g0 = close_generators(std::sync::Arc::clone(orbit.carrier()), &gen_perms)?;
    let base = match base {
        Some(text) => parse_seed(text, modulus)?,
        None => seed.clone(),
    };
    let system = build_sub_dual(parent_g, parent_h, g0, &base)?;

    let mut t_forms = Vec::new();
    let mut i_forms = Vec::new();
    for y in system.sub_carrier() {
        match orbit.form_of(&y)? {
            crate::contextual::SegForm::T(i) => t_forms.push((i, y)),
            crate::contextual::SegForm::I(j) => i_forms.push((j, y)),
        }
    }
    t_forms.sort_by_key(|(i, _)| *i);
    i_forms.sort_by_key(|(j, _)| *j);
    let join = |rows: &[(u32, PcSegment)]| {
        rows.iter()
            .map(|(_, y)| y.to_string())
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut h0_labels: Vec<String> = system
        .h0_restricted()
        .elements()
        .iter()
        .map(|e| e.display_label())
        .collect();
    h0_labels.sort_by_key(|label| {
        let digits: String = label.chars().filter(|c| c.is_ascii_digit()).collect();
        (
            label.contains('K'),
            digits.parse::<i64>().unwrap_or(i64::MAX),
        )
    });

    let mut text = format!("sub dual system on the orbit of {seed} (m={modulus})\n");
    text.push_str(&format!(
        "generators ({side} side): {}\n",
        gen_texts.join(", ")
    ));
    text.push_str(&format!("base: {base}\n"));
    text.push_str(&format!("S0: {} segments\n", system.sub_carrier().len()));
    text.push_str(&format!("  T-forms: {}\n", join(&t_forms)));
    text.push_str(&format!("  I-forms: {}\n", join(&i_forms)));
    text.push_str(&format!(
        "G0 restricted: order {}, simply transitive: yes\n",
        system.g0_restricted().order()
    ));
    text.push_str(&format!(
        "H0 restricted: order {}, elements: {}\n",
        system.h0_restricted().order(),
        h0_labels.join(", ")
    ));
    text.push_str("all six sub-dual clauses verified: yes\n");
    emit(
        cli,
        text,
        json!({
            "seed": seed.to_string(),
            "modulus": modulus.get(),
            "side": side,
            "generators": gen_texts,
            "base": base.to_string(),
            "s0_size": system.sub_carrier().len(),
            "t_forms": t_forms.iter().map(|(_, y)| y.to_string()).collect::<Vec<_>>(),
            "i_forms": i_forms.iter().map(|(_, y)| y.to_string()).collect::<Vec<_>>(),
            "g0_order": system.g0_restricted().order(),
            "h0_order": system.h0_restricted().order(),
            "h0_elements": h0_labels,
            "clauses_verified": true,
        }),
    );
    Ok(0)
}

fn cmd_covers(cli: &Cli, modulus: Modulus, octatonic: &str) -> Result<i32> {
    if modulus != Modulus::TWELVE {
        return Err(Error::InvalidArgument(
            "octatonic covers are a mod-12 construction".into(),
        ));
    }
    let id = OctatonicId::parse(octatonic)?;
    let reports = enumerate_octatonic_covers(id);
    let scale: Vec<String> = crate::subdual::octatonic_set(id)
        .iter()
        .map(|p| p.to_string())
        .collect();
    let mut text = format!(
        "simply transitive covers of octatonic {} = {{{}}}\n",
        id.name(),
        scale.join(",")
    );
    text.push_str(&format!(
        "{:<12} {:>10} {:>6}  verdict\n",
        "subset", "stabilizer", "cover"
    ));
    let mut items = Vec::new();
    let mut passing = 0usize;
    for report in &reports {
        let subset = format!(
            "{{{}}}",
            report
                .subset
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        let verdict = if report.simply_transitive {
            passing += 1;
            "simply transitive"
        } else {
            "NOT simply transitive"
        };
        text.push_str(&format!(
            "{:<12} {:>10} {:>6}  {}\n",
            subset,
            report.stabilizer.len(),
            report.cover.len(),
            verdict
        ));
        items.push(json!({
            "subset": subset,
            "stabilizer_order": report.stabilizer.len(),
            "cover_size": report.cover.len(),
            "simply_transitive": report.simply_transitive,
        }));
    }
    text.push_str(&format!(
        "{} subsets checked; {} simply transitive\n",
        reports.len(),
        passing
    ));
    emit(
        cli,
        text,
        json!({
            "octatonic": id.name(),
            "scale": scale,
            "reports": items,
            "checked": reports.len(),
            "simply_transitive": passing,
        }),
    );
    Ok(0)
}

fn cmd_morphism(cli: &Cli, modulus: Modulus, from_seed: &str, map: &str) -> Result<i32> {
    let seed = parse_seed(from_seed, modulus)?;
    let f = AffineMap::parse(map, modulus)?;
    let orbit = ti_orbit(&seed)?;
    let n = seed.len();
    let mut pairs = Vec::new();
    for q in 1..=n {
        for r in (q + 1)..=n {
            pairs.push((q, r));
        }
    }
    let morphism = morphism_from_affine(&orbit, &pairs, &f)?;
    let class = morphism.on_sub_orbit.classify();
    let text = format!(
        "affine morphism out of the orbit of {seed} (m={modulus})\n\
         map: {f}\n\
         target seed: {}\n\
         subgroup <all J(q,r)>: order {}, acting on {} segments\n\
         target contextual group: order {}, acting on {} segments\n\
         morphism: valid; monic: {}; epic: {}; iso: {}\n",
        morphism.target_orbit.seed(),
        morphism.on_sub_orbit.source().order(),
        morphism.on_sub_orbit.source().carrier().len(),
        morphism.target_group.order(),
        morphism.target_group.carrier().len(),
        yes_no(class.monic),
        yes_no(class.epic),
        yes_no(class.iso),
    );
    emit(
        cli,
        text,
        json!({
            "seed": seed.to_string(),
            "modulus": modulus.get(),
            "map": f.label(),
            "target_seed": morphism.target_orbit.seed().to_string(),
            "subgroup_order": morphism.on_sub_orbit.source().order(),
            "source_size": morphism.on_sub_orbit.source().carrier().len(),
            "target_order": morphism.target_group.order(),
            "target_size": morphism.target_group.carrier().len(),
            "valid": true,
            "monic": class.monic,
            "epic": class.epic,
            "iso": class.iso,
        }),
    );
    Ok(0)
}

fn cmd_retro(cli: &Cli, modulus: Modulus, seed: &str) -> Result<i32> {
    let seed = parse_seed(seed, modulus)?;
    let duality = build_retro_duality(&seed)?;
    let ti_st = is_simply_transitive(&duality.ti_retro);
    let plr_st = is_simply_transitive(&duality.plr_retro);
    let commute = commute_elementwise(&duality.ti_retro, &duality.plr_retro)?;
    let duals = dual_group(&duality.ti_retro)? == duality.plr_retro;
    let mut intersection: Vec<String> = duality
        .intersection
        .iter()
        .map(|e| e.display_label())
        .collect();
    intersection.sort();
    let orderings = duality.system.orderings();
    let first = orderings[0].apply(&seed)?;
    let second = orderings[1].apply(&seed)?;
    let text = format!(
        "retrograde-refined duality of {seed} (m={modulus})\n\
         carrier: {} segments (T/I-orbits of {first} and {second})\n\
         <T/I,(13)>: order {}, simply transitive: {}\n\
         <PLR(S),(13)>: order {}, simply transitive: {}\n\
         elementwise commutants of each other: {}\n\
         intersection ({} elements): {}\n",
        duality.system.carrier().len(),
        duality.ti_retro.order(),
        yes_no(ti_st),
        duality.plr_retro.order(),
        yes_no(plr_st),
        yes_no(commute && duals),
        intersection.len(),
        intersection.join(", "),
    );
    emit(
        cli,
        text,
        json!({
            "seed": seed.to_string(),
            "modulus": modulus.get(),
            "carrier_size": duality.system.carrier().len(),
            "orderings": [first.to_string(), second.to_string()],
            "ti_retro_order": duality.ti_retro.order(),
            "ti_retro_simply_transitive": ti_st,
            "plr_retro_order": duality.plr_retro.order(),
            "plr_retro_simply_transitive": plr_st,
            "mutual_commutants": commute && duals,
            "intersection": intersection,
        }),
    );
    Ok(0)
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn cmd_check_network(cli: &Cli, file: &Path) -> Result<i32> {
    let text = read_file(file)?;
    let network = parse_network(&text)?;
    let report = verify_network(&network);
    let mut text = String::new();
    let mut edge_items = Vec::new();
    for check in &report.edges {
        let status = if check.pass {
            "ok".to_string()
        } else {
            match &check.computed {
                Ok(got) => format!("FAIL (computed {got}, expected {})", check.expected),
                Err(e) => format!("FAIL ({e})"),
            }
        };
        text.push_str(&format!(
            "edge {}: {} -{}-> {}: {status}\n",
            check.index, check.from, check.op, check.to
        ));
        edge_items.push(json!({
            "index": check.index,
            "from": check.from,
            "to": check.to,
            "op": check.op,
            "pass": check.pass,
            "computed": check.computed.as_ref().map(|v| v.to_string()).ok(),
            "expected": check.expected.to_string(),
        }));
    }
    let mut square_items = Vec::new();
    for check in &report.squares {
        let status = if check.pass { "ok" } else { "FAIL" };
        text.push_str(&format!(
            "square {}: [{}]: {status}\n",
            check.index,
            check.corners.join(", ")
        ));
        square_items.push(json!({
            "index": check.index,
            "corners": check.corners,
            "pass": check.pass,
        }));
    }
    let pass = report.pass();
    text.push_str(&format!(
        "verdict: {} ({} edges, {} squares)\n",
        if pass { "PASS" } else { "FAIL" },
        report.edges.len(),
        report.squares.len()
    ));
    emit(
        cli,
        text,
        json!({
            "pass": pass,
            "edges": edge_items,
            "squares": square_items,
        }),
    );
    Ok(if pass { 0 } else { 1 })
}

fn cmd_export_dot(cli: &Cli, file: &Path, output: &Path) -> Result<i32> {
    let text = read_file(file)?;
    let network = parse_network(&text)?;
    let dot = export_dot(&network, &DotStyle::default());
    std::fs::write(output, &dot)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", output.display())))?;
    if cli.verbose > 0 {
        eprintln!("gis: wrote {}", output.display());
    }
    Ok(0)
}

fn cmd_fixtures(cli: &Cli, output: &Path) -> Result<i32> {
    let fixtures: [(&str, NetworkDoc); 4] = [
        ("opening_theme.json", figures::opening_theme_network()),
        ("rich_chain.json", figures::rich_chain_network()),
        ("schoenberg_summary.json", figures::summary_network()),
        ("m7_m10_network.json", build_m7_m10_network()),
    ];
    std::fs::create_dir_all(output)
        .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", output.display())))?;
    let mut paths = Vec::new();
    for (name, doc) in fixtures {
        let path = output.join(name);
        std::fs::write(&path, serialize_network(&doc))
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
        paths.push(path.display().to_string());
    }
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({ "written": paths })).expect("json")
        ),
        _ => {
            for p in &paths {
                println!("{p}");
            }
        }
    }
    Ok(0)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
