use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::Serialize;
use serde_json::json;

use qreset::modes::{
    calibrate_phase_velocity, find_modes, linewidth_lorentzian, linewidth_roundtrip,
    purcell_suppression, required_attenuation, Cavity,
};
use qreset::readout::{bose_occupation, effective_temperature, thermal_population};
use qreset::reset::{
    benchmark_eg_reset, benchmark_fe_reset, concatenated_reset, fringe_linecut, gamma_map,
    reset_sweep_partial, Linecut, ResetResult, SweepSpec,
};
use qreset::rf::{
    diplexer_isolation, find_cutoff, fit_elements, sweep_s_params, to_db, DiplexerPath,
    DiplexerSpec, FitResult, FitTarget, FrequencyGrid, IsolationReport, LadderTopology, LineParams,
    NetworkChain,
};

use crate::config::{Protocol, RunConfig};
use crate::output::{num, Outputs};
use crate::svg::{heatmap, line_plot, Series};
use crate::CliError;

/// Isolation the diplexer is specified to reach [dB].
const ISOLATION_GOAL_DB: f64 = -60.0;

fn lowpass(cfg: &RunConfig) -> NetworkChain {
    LadderTopology::lowpass(cfg.device.filter_order).build(&cfg.device.lowpass.values())
}

fn highpass(cfg: &RunConfig) -> NetworkChain {
    LadderTopology::highpass(cfg.device.filter_order).build(&cfg.device.highpass.values())
}

/// LP–line–LP cavity, phase velocity fixed by `eps_eff` or calibrated to `mode_ghz`.
fn cavity(cfg: &RunConfig) -> Result<Cavity, CliError> {
    let d = &cfg.device;
    let line = LineParams::from_permittivity(
        d.z0_ohm,
        d.line_length_mm * 1e-3,
        d.eps_eff.unwrap_or(6.45),
        d.attenuation_np_per_m,
    );
    let mut cav = Cavity::symmetric(line, lowpass(cfg));
    if d.eps_eff.is_none() {
        cav.line.phase_velocity = calibrate_phase_velocity(&cav, TAU * d.mode_ghz * 1e9, 2)?;
    }
    Ok(cav)
}

fn grid(lo: f64, hi: f64, step: f64) -> Result<FrequencyGrid, CliError> {
    FrequencyGrid::linear(lo, hi, step).map_err(|e| CliError::config(e.to_string()))
}

pub struct Run<'a> {
    pub cfg: &'a RunConfig,
    pub out: &'a mut Outputs,
}

#[derive(Serialize)]
struct SparamsSummary {
    band_ghz: [f64; 2],
    points: usize,
    lowpass_cutoff_ghz: Option<f64>,
    highpass_cutoff_ghz: Option<f64>,
    isolation: IsolationReport,
    isolation_goal_db: f64,
    phase_velocity_m_per_s: f64,
}

pub fn sparams(run: Run, band: Option<(f64, f64)>) -> Result<(), CliError> {
    let cfg = run.cfg;
    let (lo, hi) = band.unwrap_or((cfg.sweep.band_ghz[0] * 1e9, cfg.sweep.band_ghz[1] * 1e9));
    let g = grid(lo, hi, cfg.sweep.step_mhz * 1e6)?;
    let (lp, hp) = (lowpass(cfg), highpass(cfg));
    let cav = cavity(cfg)?;
    let chain = cav.chain()?;
    let dip = DiplexerSpec::new(lp.clone(), hp.clone());
    let lp_s = sweep_s_params(&lp, &g)?;
    let hp_s = sweep_s_params(&hp, &g)?;
    let cav_s = sweep_s_params(&chain, &g)?;
    let iso: Vec<f64> = g
        .freqs()
        .iter()
        .map(|&f| {
            dip.transmission(DiplexerPath::LowpassToHighpass, TAU * f)
                .map(to_db)
        })
        .collect::<Result<_, _>>()?;
    let rows = (0..g.len()).map(|i| {
        format!(
            "{},{},{},{},{}",
            g.freqs()[i] / 1e9,
            lp_s[i].s21_db(),
            hp_s[i].s21_db(),
            cav_s[i].s21_db(),
            iso[i]
        )
    });
    run.out.csv(
        "sparams.csv",
        "freq_ghz,lowpass_s21_db,highpass_s21_db,cavity_s21_db,isolation_db",
        rows,
    )?;
    let isolation = diplexer_isolation(&dip, &g)?;
    let summary = SparamsSummary {
        band_ghz: [lo / 1e9, hi / 1e9],
        points: g.len(),
        lowpass_cutoff_ghz: find_cutoff(&lp, -3.0, (lo, hi)).ok().map(|f| f / 1e9),
        highpass_cutoff_ghz: find_cutoff(&hp, -3.0, (lo, hi)).ok().map(|f| f / 1e9),
        isolation,
        isolation_goal_db: ISOLATION_GOAL_DB,
        phase_velocity_m_per_s: cav.line.phase_velocity,
    };
    run.out.json("sparams.json", &summary)?;
    let series = |name, s: &[qreset::rf::SweepPoint]| Series {
        name,
        points: s
            .iter()
            .map(|p| (p.freq_hz / 1e9, p.s21_db().max(-120.0)))
            .collect(),
    };
    run.out.svg("sparams.svg", || {
        line_plot(
            "Transmission",
            "frequency [GHz]",
            "|S21| [dB]",
            &[
                series("low-pass", &lp_s),
                series("high-pass", &hp_s),
                series("LP-line-LP", &cav_s),
                Series {
                    name: "LP to HP port",
                    points: g
                        .freqs()
                        .iter()
                        .zip(&iso)
                        .map(|(f, d)| (f / 1e9, d.max(-120.0)))
                        .collect(),
                },
            ],
        )
    })?;
    println!(
        "sparams: {} points over {:.3}–{:.3} GHz; worst isolation {:.1} dB at {:.3} GHz (goal {ISOLATION_GOAL_DB} dB)",
        g.len(),
        lo / 1e9,
        hi / 1e9,
        isolation.worst_db,
        isolation.worst_freq_hz / 1e9
    );
    Ok(())
}

/// One linewidth estimate of one mode.
#[derive(Serialize)]
struct ModeEntry {
    f_hz: f64,
    kappa_hz: Option<f64>,
    order: u32,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    finesse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_rms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

struct Curve {
    order: u32,
    freqs: Vec<f64>,
    power: Vec<f64>,
    fit: Vec<f64>,
}

pub fn modes(run: Run) -> Result<(), CliError> {
    let cfg = run.cfg;
    let cav = cavity(cfg)?;
    let band = (
        cfg.sweep.mode_band_ghz[0] * 1e9,
        cfg.sweep.mode_band_ghz[1] * 1e9,
    );
    let found = find_modes(&cav, band)?;
    let chain = cav.chain()?;
    let mut entries = Vec::new();
    let mut curves = Vec::new();
    for m in &found {
        let k = linewidth_roundtrip(&cav, m);
        entries.push(ModeEntry {
            f_hz: m.freq_hz(),
            kappa_hz: k.as_ref().ok().map(|k| k / TAU),
            order: m.half_waves,
            method: "roundtrip",
            finesse: m.finesse(),
            relative_rms: None,
            warning: k.as_ref().err().map(|e| e.to_string()),
        });
        let Ok(k) = k else { continue };
        let span = 8.0 * k / TAU;
        let g = FrequencyGrid::linspace(m.freq_hz() - span, m.freq_hz() + span, 2001)?;
        match linewidth_lorentzian(&chain, &g) {
            Ok(est) => {
                entries.push(ModeEntry {
                    f_hz: est.omega / TAU,
                    kappa_hz: Some(est.kappa / TAU),
                    order: m.half_waves,
                    method: "lorentzian",
                    finesse: None,
                    relative_rms: Some(est.fit.relative_rms),
                    warning: est.warning(),
                });
                let power = sweep_s_params(&chain, &g)?
                    .iter()
                    .map(|p| p.s.s21.norm_sqr())
                    .collect();
                curves.push(Curve {
                    order: m.half_waves,
                    freqs: g.freqs().to_vec(),
                    power,
                    fit: g.freqs().iter().map(|&f| est.fit.eval(f)).collect(),
                });
            }
            Err(e) => entries.push(ModeEntry {
                f_hz: m.freq_hz(),
                kappa_hz: None,
                order: m.half_waves,
                method: "lorentzian",
                finesse: None,
                relative_rms: None,
                warning: Some(e.to_string()),
            }),
        }
    }
    let target = TAU * cfg.system.kappa_mhz * 1e6;
    let alpha = found
        .iter()
        .find(|m| m.is_full_wave())
        .map(|m| required_attenuation(&cav, m, target).map_err(|e| e.to_string()));
    let qubit = TAU * cfg.system.qubit_max_ghz * 1e9;
    let suppression = purcell_suppression(lowpass(cfg).s_params(qubit)?.s11)?;

    run.out.json(
        "modes.json",
        &json!({
            "modes": entries,
            "phase_velocity_m_per_s": cav.line.phase_velocity,
            "eps_eff": cav.line.eps_eff(),
            "calibrated": cfg.device.eps_eff.is_none(),
            "attenuation_np_per_m": cav.line.attenuation,
            "target_kappa_hz": target / TAU,
            "required_attenuation_np_per_m": alpha.as_ref().and_then(|a| a.as_ref().ok()),
            "required_attenuation_error": alpha.as_ref().and_then(|a| a.as_ref().err()),
            "purcell_suppression": { "f_hz": qubit / TAU, "linear": suppression.linear, "db": suppression.db },
        }),
    )?;
    let mut rows = Vec::new();
    for c in &curves {
        for i in 0..c.freqs.len() {
            rows.push(format!(
                "{},{},{},{}",
                c.order, c.freqs[i], c.power[i], c.fit[i]
            ));
        }
    }
    run.out
        .csv("lorentzian.csv", "order,f_hz,s21_power,fit", rows)?;
    let g = grid(band.0, band.1, (band.1 - band.0) / 4000.0)?;
    let sweep = sweep_s_params(&chain, &g)?;
    run.out.svg("modes.svg", || {
        line_plot(
            "LP-line-LP transmission",
            "frequency [GHz]",
            "|S21| [dB]",
            &[Series {
                name: "cavity",
                points: sweep
                    .iter()
                    .map(|p| (p.freq_hz / 1e9, p.s21_db().max(-120.0)))
                    .collect(),
            }],
        )
    })?;
    println!(
        "modes: v = {:.4e} m/s, ε_eff = {:.3}",
        cav.line.phase_velocity,
        cav.line.eps_eff()
    );
    for e in &entries {
        println!(
            "  order {} ({}): {:.4} GHz, κ/2π = {}",
            e.order,
            e.method,
            e.f_hz / 1e9,
            e.kappa_hz
                .map_or("n/a".into(), |k| format!("{:.4} MHz", k / 1e6))
        );
    }
    match &alpha {
        Some(Ok(a)) => println!("  α for κ/2π = {} MHz: {a:.4} Np/m", cfg.system.kappa_mhz),
        Some(Err(e)) => println!("  α for κ/2π = {} MHz: {e}", cfg.system.kappa_mhz),
        None => println!("  no full-wave mode in band"),
    }
    Ok(())
}

pub fn gamma_map_cmd(run: Run) -> Result<(), CliError> {
    let cfg = run.cfg;
    let kappa = TAU * cfg.system.kappa_mhz * 1e6;
    let g: Vec<f64> = cfg
        .sweep
        .gamma_g_mhz
        .iter()
        .map(|x| TAU * x * 1e6)
        .collect();
    let d_mhz = cfg.sweep.gamma_delta_mhz.points();
    let d: Vec<f64> = d_mhz.iter().map(|x| TAU * x * 1e6).collect();
    let m = gamma_map(kappa, &g, &d);
    let mut rows = Vec::new();
    for (i, gi) in cfg.sweep.gamma_g_mhz.iter().enumerate() {
        for (j, dj) in d_mhz.iter().enumerate() {
            rows.push(format!(
                "{gi},{dj},{},{}",
                m.gamma[i][j] / TAU / 1e6,
                m.gamma[i][j] / kappa
            ));
        }
    }
    run.out.csv(
        "gamma_map.csv",
        "g_mhz,delta_mhz,gamma_mhz,gamma_over_kappa",
        rows,
    )?;
    let argmax: Vec<f64> = (0..g.len())
        .map(|i| m.argmax_delta(i) / TAU / 1e6)
        .collect();
    run.out.json(
        "gamma_map.json",
        &json!({
            "kappa_mhz": cfg.system.kappa_mhz,
            "g_mhz": cfg.sweep.gamma_g_mhz,
            "delta_mhz": d_mhz,
            "gamma_mhz": m.gamma.iter().map(|r| r.iter().map(|x| x / TAU / 1e6).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "argmax_delta_mhz": argmax,
        }),
    )?;
    run.out.svg("gamma_map.svg", || {
        let z: Vec<Vec<f64>> = m
            .gamma
            .iter()
            .map(|r| r.iter().map(|x| x / kappa).collect())
            .collect();
        heatmap(
            "Purcell rate",
            "Δ/2π [MHz]",
            "g/2π [MHz]",
            "Γ/κ",
            &d_mhz,
            &cfg.sweep.gamma_g_mhz,
            &z,
        )
    })?;
    println!(
        "gamma-map: {} × {} cells, Γ ≤ κ/2 = 2π × {:.4} MHz",
        g.len(),
        d.len(),
        cfg.system.kappa_mhz / 2.0
    );
    Ok(())
}

pub fn reset_sweep_cmd(run: Run) -> Result<Vec<String>, CliError> {
    let cfg = run.cfg;
    let spec = SweepSpec {
        tp_ns: cfg.sweep.tp_ns.points(),
        plateau_ghz: cfg.sweep.plateau_ghz.points(),
        initial: cfg.sweep.initial,
        params: cfg.system.params(),
    };
    let map = reset_sweep_partial(&spec)?;
    let mut rows = Vec::new();
    for (i, f) in map.plateau_ghz.iter().enumerate() {
        for (j, t) in map.tp_ns.iter().enumerate() {
            rows.push(format!("{f},{t},{}", num(map.p_e[i][j])));
        }
    }
    run.out.csv("reset_sweep.csv", "freq_ghz,tp_ns,p_e", rows)?;
    run.out.json("reset_sweep.json", &map)?;
    run.out.svg("reset_sweep.svg", || {
        heatmap(
            "Excited population after reset pulse",
            "t_p [ns]",
            "plateau [GHz]",
            "P_e",
            &map.tp_ns,
            &map.plateau_ghz,
            &map.p_e,
        )
    })?;
    if !map.failures.is_empty() {
        run.out.report("failures.json", &map.failures)?;
    }
    println!(
        "reset-sweep: {} × {} cells, {} failed",
        map.plateau_ghz.len(),
        map.tp_ns.len(),
        map.failures.len()
    );
    Ok(map.failures)
}

#[derive(Serialize)]
struct BenchReport {
    protocol: String,
    /// Probability that a reset excited state is still read out as itself afterwards.
    residuals: BTreeMap<String, f64>,
    first_min_ns: Option<f64>,
    envelope_ns: Option<f64>,
    steady_state_pe: f64,
    warnings: Vec<String>,
    detail: ResetResult,
}

impl From<ResetResult> for BenchReport {
    fn from(r: ResetResult) -> Self {
        let m = &r.assigned_after;
        let residuals = m
            .prepared
            .iter()
            .enumerate()
            .filter_map(|(i, l)| {
                let k = m.assigned.iter().position(|a| a == l)?;
                // f→e alone leaves a prepared e in place by design
                let reset = k > 0 && !(r.protocol == "fe" && l == "e");
                reset.then(|| (l.clone(), m.p[i][k]))
            })
            .collect();
        Self {
            protocol: r.protocol.clone(),
            residuals,
            first_min_ns: r.first_min_ns,
            envelope_ns: r.envelope_ns,
            steady_state_pe: r.steady_state_pe,
            warnings: r.warnings.clone(),
            detail: r,
        }
    }
}

pub fn reset_bench(run: Run, protocol: Option<Protocol>) -> Result<(), CliError> {
    let cfg = run.cfg;
    let p = cfg.system.params();
    let prep = cfg.readout.preparation();
    let ro = cfg.readout.model();
    let tp = cfg.sweep.reset_tp_ns * 1e-9;
    let which = protocol.unwrap_or(cfg.sweep.protocol);
    let wants = |x: Protocol| which == Protocol::All || which == x;

    let mut reports: Vec<BenchReport> = Vec::new();
    let mut cut: Option<Linecut> = None;
    if wants(Protocol::Eg) {
        let lc = fringe_linecut(&p, &cfg.sweep.linecut_tp_ns.points())?;
        let r = benchmark_eg_reset(&p, p.omega_d, tp, &prep, &ro)?.with_linecut(&lc);
        reports.push(r.into());
        cut = Some(lc);
    }
    if wants(Protocol::Fe) {
        let plateau = p.three_level().resonant_plateau(2);
        reports.push(benchmark_fe_reset(&p, plateau, tp, &prep, &ro)?.into());
    }
    if wants(Protocol::Concatenated) {
        reports.push(concatenated_reset(&p, tp, &prep, &ro)?.into());
    }

    let mut rows = Vec::new();
    for r in &reports {
        for (stage, m) in [
            ("before", &r.detail.assigned_before),
            ("after", &r.detail.assigned_after),
        ] {
            for (i, label) in m.prepared.iter().enumerate() {
                let mut row = m.p[i].clone();
                row.resize(3, f64::NAN);
                rows.push(format!(
                    "{},{stage},{label},{},{},{}",
                    r.protocol,
                    num(row[0]),
                    num(row[1]),
                    num(row[2])
                ));
            }
        }
    }
    run.out.csv(
        "reset_bench.csv",
        "protocol,stage,prepared,assigned_g,assigned_e,assigned_f",
        rows,
    )?;
    for r in &reports {
        run.out.json(
            &format!("reset_bench_{}.json", r.protocol.replace('+', "_")),
            r,
        )?;
    }
    if let Some(lc) = &cut {
        run.out.csv(
            "linecut.csv",
            "tp_ns,p_e",
            lc.tp_ns
                .iter()
                .zip(&lc.p_e)
                .map(|(t, v)| format!("{t},{v}")),
        )?;
        run.out.svg("linecut.svg", || {
            line_plot(
                "Resonant line-cut",
                "t_p [ns]",
                "P_e",
                &[
                    Series {
                        name: "simulated",
                        points: lc
                            .tp_ns
                            .iter()
                            .copied()
                            .zip(lc.p_e.iter().copied())
                            .collect(),
                    },
                    Series {
                        name: "thermal baseline",
                        points: vec![
                            (lc.tp_ns[0], lc.baseline),
                            (lc.tp_ns[lc.tp_ns.len() - 1], lc.baseline),
                        ],
                    },
                ],
            )
        })?;
    }
    for r in &reports {
        let excited: Vec<String> = r
            .residuals
            .iter()
            .map(|(l, v)| format!("prepared {l} → assigned {l} {:.3}%", 100.0 * v))
            .collect();
        println!("reset-bench {}: {}", r.protocol, excited.join(", "));
        if let (Some(m), Some(e)) = (r.first_min_ns, r.envelope_ns) {
            println!("  first minimum {m:.2} ns, envelope {e:.2} ns");
        }
        for w in &r.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Thermal {
    freq_ghz: f64,
    temperature_mk: f64,
    population: f64,
    n_th: f64,
}

pub fn thermal(
    run: Run,
    freq: Option<f64>,
    temp: Option<f64>,
    population: Option<f64>,
) -> Result<(), CliError> {
    let cfg = run.cfg;
    let f = freq.unwrap_or(cfg.system.qubit_max_ghz * 1e9);
    let w = TAU * f;
    let (t, p) = match (temp, population) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "give either --temp or --population, not both".into(),
            ))
        }
        (None, Some(p)) => {
            let t = effective_temperature(w, p)
                .map_err(|e| CliError::config(format!("--population: {e}")))?;
            (t, p)
        }
        (t, None) => {
            let t = t.unwrap_or(cfg.system.t_bath_mk * 1e-3);
            (t, thermal_population(w, t))
        }
    };
    let rec = Thermal {
        freq_ghz: f / 1e9,
        temperature_mk: t * 1e3,
        population: p,
        n_th: bose_occupation(w, t),
    };
    run.out.csv(
        "thermal.csv",
        "freq_ghz,temperature_mk,population,n_th",
        [format!(
            "{},{},{},{}",
            rec.freq_ghz, rec.temperature_mk, rec.population, rec.n_th
        )],
    )?;
    run.out.json("thermal.json", &rec)?;
    println!(
        "thermal: {:.4} GHz, {:.3} mK ↔ P_e = {:.4}% (n̄ = {:.4e})",
        rec.freq_ghz,
        rec.temperature_mk,
        100.0 * rec.population,
        rec.n_th
    );
    Ok(())
}

#[derive(Serialize)]
struct BranchFit {
    target_ghz: f64,
    achieved_ghz: f64,
    fit: FitResult,
}

pub fn fit_filter(run: Run) -> Result<(), CliError> {
    let cfg = run.cfg;
    let d = &cfg.device;
    let mut branches = Vec::new();
    for (topo, init, target) in [
        (
            LadderTopology::lowpass(d.filter_order),
            d.lowpass.values(),
            d.lowpass_cutoff_ghz * 1e9,
        ),
        (
            LadderTopology::highpass(d.filter_order),
            d.highpass.values(),
            d.highpass_cutoff_ghz * 1e9,
        ),
    ] {
        let fit = fit_elements(&topo, &[FitTarget::cutoff(target).into()], init)?;
        let chain = topo.build(&fit.values);
        let achieved = find_cutoff(&chain, -3.0, (0.05 * target, (20.0 * target).min(20e9)))?;
        if !fit.converged {
            return Err(CliError::numeric(format!(
                "fit to {:.3} GHz did not converge",
                target / 1e9
            )));
        }
        branches.push((
            chain,
            BranchFit {
                target_ghz: target / 1e9,
                achieved_ghz: achieved / 1e9,
                fit,
            },
        ));
    }
    let (hp, hp_fit) = branches.pop().expect("two branches");
    let (lp, lp_fit) = branches.pop().expect("two branches");
    let dip = DiplexerSpec::new(lp.clone(), hp.clone());
    let g = grid(
        cfg.sweep.band_ghz[0] * 1e9,
        cfg.sweep.band_ghz[1] * 1e9,
        cfg.sweep.step_mhz * 1e6,
    )?;
    let iso = diplexer_isolation(&dip, &g)?;
    let lp_s = sweep_s_params(&lp, &g)?;
    let hp_s = sweep_s_params(&hp, &g)?;
    run.out.json(
        "fit_filter.json",
        &json!({
            "lowpass": lp_fit,
            "highpass": hp_fit,
            "isolation": iso,
            "isolation_goal_db": ISOLATION_GOAL_DB,
            "isolation_gap_db": iso.worst_db - ISOLATION_GOAL_DB,
        }),
    )?;
    run.out.csv(
        "fit_filter.csv",
        "freq_ghz,lowpass_s21_db,highpass_s21_db",
        (0..g.len()).map(|i| {
            format!(
                "{},{},{}",
                g.freqs()[i] / 1e9,
                lp_s[i].s21_db(),
                hp_s[i].s21_db()
            )
        }),
    )?;
    run.out.svg("fit_filter.svg", || {
        let s = |name, v: &[qreset::rf::SweepPoint]| Series {
            name,
            points: v
                .iter()
                .map(|p| (p.freq_hz / 1e9, p.s21_db().max(-120.0)))
                .collect(),
        };
        line_plot(
            "Fitted filters",
            "frequency [GHz]",
            "|S21| [dB]",
            &[s("low-pass", &lp_s), s("high-pass", &hp_s)],
        )
    })?;
    for (name, b) in [("low-pass", &lp_fit), ("high-pass", &hp_fit)] {
        println!(
            "fit-filter {name}: −3 dB at {:.4} GHz (target {:.4}), L = {:.4} nH, C = {:.4} pF",
            b.achieved_ghz,
            b.target_ghz,
            b.fit.values.inductance * 1e9,
            b.fit.values.capacitance * 1e12
        );
    }
    println!(
        "  isolation worst {:.1} dB at {:.3} GHz ({:+.1} dB from the {ISOLATION_GOAL_DB} dB goal)",
        iso.worst_db,
        iso.worst_freq_hz / 1e9,
        iso.worst_db - ISOLATION_GOAL_DB
    );
    Ok(())
}
