use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2};

use crate::alternating::{ad_distance, ad_operator};
use crate::diffusion::{diffusion_distance, stationary_distribution, Embedding, Truncation};
use crate::error::{Error, Result, StageContext};
use crate::evaluation::{
    angle_recovery_r2, check_metric_properties, knn_classify, quantize_angle, scalar_recovery_r2,
    KnnConfig, TripleSampling,
};
use crate::fusion::{
    alternating_embedding, common_graph, concatenation_baseline, multiplication_baseline,
    ordered_pairs, sensor_diffusion_map, sensor_operator, union_distance, FusionConfig,
    MahalanobisConfig, MultimodalDataset, SensorMetric, UnionExponent, UnionVariant,
};
use crate::io::{format_value, load_matrix, meta_value, save_matrix, MatrixFile};
use crate::kernels::{
    euclidean_distance_matrix, local_covariances, mahalanobis_distance_matrix, DistanceMatrix,
    SampleMatrix, Shrinkage,
};
use crate::synthetic::{generate_toy_dataset, ToyConfig};

use super::manifest::{ensure_dir, read_record, sidecar, Manifest, Timing};
use super::settings::{key, parse_bool, Key, Settings};
use super::svg::{self, Ramp};
use super::{DataArgs, DistancesArgs, EmbedArgs, EvalArgs, FusionArgs, GenToyArgs, PlotArgs};

const TOY_KEYS: &[Key] = &[
    key("n", "500"),
    key("seed", "42"),
    key("d_proj", "200"),
    key("arrow_length", "14"),
    key("arrow_thickness", "10"),
    key("noise_sensor", "false"),
    key("noise_rate", "100"),
    key("noise_window", "64"),
];

const FUSION_KEYS: &[Key] = &[
    key("t", "1"),
    key("sensor_multiplier", "1"),
    key("union_multiplier", "1"),
    key("metric", "euclidean"),
    key("pair_truncation", "gap:15"),
    key("final_truncation", "15"),
    key("union_exponent", "squared"),
    key("projection_dim", "none"),
    key("knn", "16"),
    key("shrinkage", "trace:0.001"),
    key("rank", "auto"),
    key("seed", "42"),
];

const EMBED_KEYS: &[Key] = &[key("scheme", "common-graph"), key("pair", "all")];

const DISTANCE_KEYS: &[Key] = &[
    key("kind", "euclidean"),
    key("sensor", "1"),
    key("pair", "1,2"),
];

const EVAL_KEYS: &[Key] = &[
    key("k", "7"),
    key("repeats", "10"),
    key("train_fraction", "0.75"),
    key("seed", "0"),
    key("bins", "4"),
    key("label", "theta1"),
];

const PLOT_KEYS: &[Key] = &[
    key("x", "0"),
    key("y", "1"),
    key("color_by", "none"),
    key("ramp", "auto"),
];

const TRUTH_FILE: &str = "ground_truth.csv";
const MANIFEST_FILE: &str = "manifest.txt";
const TIMING_FILE: &str = "timing.txt";

fn keys(parts: &[&[Key]]) -> Vec<Key> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

pub fn toy_config(s: &Settings) -> Result<ToyConfig> {
    let cfg = ToyConfig {
        n: s.get("n")?,
        seed: s.get("seed")?,
        d_proj: s.get("d_proj")?,
        arrow_length: s.get("arrow_length")?,
        arrow_thickness: s.get("arrow_thickness")?,
        include_noise_sensor: s.parse_with("noise_sensor", parse_bool)?,
        noise_rate: s.get("noise_rate")?,
        noise_window: s.get("noise_window")?,
        ..ToyConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn parse_truncation(v: &str) -> std::result::Result<Truncation, String> {
    if v == "gap" {
        return Ok(Truncation::default());
    }
    if let Some(l) = v.strip_prefix("gap:") {
        let l_max = l.parse::<usize>().map_err(|e| e.to_string())?;
        return Ok(Truncation::SpectralGap { l_max });
    }
    v.parse::<usize>()
        .map(Truncation::Fixed)
        .map_err(|_| "expected gap, gap:<l_max> or a count".to_string())
}

fn parse_shrinkage(v: &str) -> std::result::Result<Shrinkage, String> {
    let (kind, x) = v
        .split_once(':')
        .ok_or_else(|| "expected trace:<fraction> or abs:<value>".to_string())?;
    let x = x.parse::<f64>().map_err(|e| e.to_string())?;
    match kind {
        "trace" => Ok(Shrinkage::TraceRelative(x)),
        "abs" => Ok(Shrinkage::Absolute(x)),
        _ => Err(format!("unknown shrinkage kind {kind:?}")),
    }
}

fn parse_optional(v: &str, none: &str) -> std::result::Result<Option<usize>, String> {
    if v == none {
        Ok(None)
    } else {
        v.parse::<usize>()
            .map(Some)
            .map_err(|_| format!("expected {none} or a positive integer"))
    }
}

fn parse_pair(v: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = v
        .split_once(',')
        .ok_or_else(|| "expected a pair such as 1,2".to_string())?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad sensor index {a:?}"))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| format!("bad sensor index {b:?}"))?;
    if a == 0 || b == 0 {
        return Err("sensor indices start at 1".into());
    }
    Ok((a - 1, b - 1))
}

pub fn fusion_config(s: &Settings) -> Result<FusionConfig> {
    let sensor_multipliers = s.parse_with("sensor_multiplier", |v| {
        v.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| e.to_string()))
            .collect::<std::result::Result<Vec<_>, _>>()
    })?;
    let cfg = FusionConfig {
        t: s.get("t")?,
        sensor_multipliers,
        union_multiplier: s.get("union_multiplier")?,
        sensor_metric: s.parse_with("metric", |v| match v {
            "euclidean" => Ok(SensorMetric::Euclidean),
            "mahalanobis" => Ok(SensorMetric::Mahalanobis),
            _ => Err("expected euclidean or mahalanobis".into()),
        })?,
        pair_truncation: s.parse_with("pair_truncation", parse_truncation)?,
        final_truncation: s.parse_with("final_truncation", parse_truncation)?,
        union: UnionVariant::DistanceSum,
        union_exponent: s.parse_with("union_exponent", |v| match v {
            "squared" => Ok(UnionExponent::Squared),
            "unsquared" => Ok(UnionExponent::Unsquared),
            _ => Err("expected squared or unsquared".into()),
        })?,
        projection_dim: s.parse_with("projection_dim", |v| parse_optional(v, "none"))?,
        mahalanobis: MahalanobisConfig {
            k_nn: s.get("knn")?,
            shrinkage: s.parse_with("shrinkage", parse_shrinkage)?,
            rank: s.parse_with("rank", |v| parse_optional(v, "auto"))?,
        },
        seed: s.get("seed")?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn fusion_flags(f: FusionArgs) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("t", f.t),
        ("sensor_multiplier", f.sensor_multiplier),
        ("union_multiplier", f.union_multiplier),
        ("metric", f.metric),
        ("pair_truncation", f.pair_truncation),
        ("final_truncation", f.final_truncation),
        ("union_exponent", f.union_exponent),
        ("projection_dim", f.projection_dim),
        ("knn", f.knn),
        ("shrinkage", f.shrinkage),
        ("rank", f.rank),
        ("seed", f.seed),
    ]
}

fn sensor_name(m: &MatrixFile, path: &Path) -> String {
    meta_value(&m.meta, "sensor")
        .map(str::to_string)
        .unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sensor".into())
        })
}

fn load_dataset(args: &DataArgs, manifest: &mut Manifest) -> Result<MultimodalDataset<f64>> {
    let paths: Vec<PathBuf> = match (&args.sensors, &args.data) {
        (Some(list), _) => list.clone(),
        (None, Some(dir)) => {
            let mpath = dir.join(MANIFEST_FILE);
            let record = read_record(&mpath, "sensors")
                .map_err(|e| Error::invalid_input(format!("cannot read {}: {e}", mpath.display())))?
                .ok_or_else(|| {
                    Error::invalid_input(format!("{} lists no sensors", mpath.display()))
                })?;
            record.split(',').map(|f| dir.join(f.trim())).collect()
        }
        (None, None) => {
            return Err(Error::invalid_config(
                "give --data <dir> or --sensors <files>",
            ))
        }
    };
    let mut sensors = Vec::with_capacity(paths.len());
    let mut names = Vec::with_capacity(paths.len());
    for p in &paths {
        let m = load_matrix(p).stage(|| format!("reading {}", p.display()))?;
        manifest.input(p)?;
        let name = sensor_name(&m, p);
        names.push(
            p.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        );
        sensors.push(SampleMatrix::new(m.data, name).stage(|| format!("reading {}", p.display()))?);
    }
    manifest.record("sensors", names.join(","));
    MultimodalDataset::new(sensors, None)
}

fn embedding_meta(e: &Embedding<f64>) -> Vec<String> {
    let eig: Vec<String> = e
        .eigenvalues
        .iter()
        .map(|z| {
            if z.im == 0.0 {
                format_value(z.re)
            } else {
                format!("{}:{}", format_value(z.re), format_value(z.im))
            }
        })
        .collect();
    vec![
        format!("eigenvalues={} t={}", eig.join(","), e.t),
        format!("source={} complex={}", e.source, e.complex),
    ]
}

fn write_embedding(path: &Path, e: &Embedding<f64>, manifest: &mut Manifest) -> Result<()> {
    save_matrix(path, &e.coordinates, "embedding", &embedding_meta(e))?;
    manifest.output(path);
    Ok(())
}

pub(super) fn gen_toy(a: GenToyArgs) -> Result<()> {
    let flags = vec![
        ("n", a.n),
        ("seed", a.seed),
        ("d_proj", a.d_proj),
        ("arrow_length", a.arrow_length),
        ("arrow_thickness", a.arrow_thickness),
        ("noise_sensor", a.noise_sensor),
        ("noise_rate", a.noise_rate),
        ("noise_window", a.noise_window),
    ];
    let s = Settings::resolve(TOY_KEYS, a.config.as_deref(), &flags)?;
    let cfg = toy_config(&s)?;
    ensure_dir(&a.out)?;
    let mut timing = Timing::default();
    let data = timing.time("generate", || generate_toy_dataset::<f64>(&cfg))?;
    let mut manifest = Manifest::new("gen-toy", &s);
    timing.time("write", || {
        let mut files = Vec::new();
        for sensor in &data.sensors {
            let name = format!("{}.csv", sensor.sensor_id());
            let path = a.out.join(&name);
            save_matrix(
                &path,
                sensor.data(),
                "sensor",
                &[format!("sensor={}", sensor.sensor_id())],
            )?;
            manifest.output(&path);
            files.push(name);
        }
        let truth = data
            .ground_truth
            .as_ref()
            .expect("toy data carries ground truth");
        let cols = truth.columns();
        let mut t = Array2::<f64>::zeros((data.n_samples(), cols.len()));
        for (j, (_, c)) in cols.iter().enumerate() {
            t.column_mut(j).assign(c);
        }
        let names: Vec<&str> = cols.iter().map(|(n, _)| n.as_str()).collect();
        let angular: Vec<&str> = names
            .iter()
            .copied()
            .filter(|n| *n != "noise_freq")
            .collect();
        let tpath = a.out.join(TRUTH_FILE);
        save_matrix(
            &tpath,
            &t,
            "ground_truth",
            &[
                format!("columns={}", names.join(",")),
                format!("angular={}", angular.join(",")),
            ],
        )?;
        manifest.output(&tpath);
        manifest.record("sensors", files.join(","));
        manifest.record("truth", TRUTH_FILE);
        manifest.write(&a.out.join(MANIFEST_FILE))
    })?;
    timing.write(&a.out.join(TIMING_FILE))
}

pub(super) fn embed(a: EmbedArgs) -> Result<()> {
    let mut flags = vec![("scheme", a.scheme), ("pair", a.pair)];
    flags.extend(fusion_flags(a.fusion));
    let s = Settings::resolve(
        &keys(&[EMBED_KEYS, FUSION_KEYS]),
        a.config.as_deref(),
        &flags,
    )?;
    let mut cfg = fusion_config(&s)?;
    let scheme: String = s.get("scheme")?;
    let pair = s.raw("pair").to_string();
    let pair = if pair == "all" {
        None
    } else {
        Some(s.parse_with("pair", parse_pair)?)
    };
    let mut manifest = Manifest::new("embed", &s);
    let mut timing = Timing::default();
    let data = timing.time("load", || load_dataset(&a.data, &mut manifest))?;
    ensure_dir(&a.out)?;
    let stem = scheme.replace('-', "_");
    let mut outputs: Vec<(String, Embedding<f64>)> = Vec::new();
    match scheme.as_str() {
        "dm" => {
            for i in 0..data.n_sensors() {
                let e = timing.time(&format!("dm {}", i + 1), || sensor_diffusion_map(&data, i, &cfg))?;
                outputs.push((format!("dm_{}.csv", data.sensors[i].sensor_id()), e));
            }
        }
        "ad" => {
            let pairs = match pair {
                Some(p) => vec![p],
                None => ordered_pairs(data.n_sensors()),
            };
            for p in pairs {
                let e = timing.time(&format!("ad {},{}", p.0 + 1, p.1 + 1), || {
                    alternating_embedding(&data, p, &cfg)
                })?;
                let name = format!("ad_{}_{}.csv", data.sensors[p.0].sensor_id(), data.sensors[p.1].sensor_id());
                outputs.push((name, e));
            }
        }
        "common-graph" | "common-graph-mahalanobis" => {
            if scheme == "common-graph-mahalanobis" {
                cfg.union = UnionVariant::MahalanobisUnion;
            }
            let e = timing.time(&scheme, || common_graph(&data, &cfg))?;
            outputs.push((format!("{stem}.csv"), e));
        }
        "concat" => {
            let e = timing.time(&scheme, || concatenation_baseline(&data, &cfg))?;
            outputs.push((format!("{stem}.csv"), e));
        }
        "mult" => {
            let e = timing.time(&scheme, || multiplication_baseline(&data, &cfg))?;
            outputs.push((format!("{stem}.csv"), e));
        }
        other => {
            return Err(s.context(
                "scheme",
                Error::invalid_config(format!(
                    "unknown scheme {other:?}; expected dm, ad, common-graph, common-graph-mahalanobis, concat or mult"
                )),
            ))
        }
    }
    for (name, e) in &outputs {
        write_embedding(&a.out.join(name), e, &mut manifest)?;
    }
    manifest.write(&a.out.join(format!("{stem}.manifest.txt")))?;
    timing.write(&a.out.join(format!("{stem}.timing.txt")))
}

struct Truth {
    names: Vec<String>,
    angular: Vec<String>,
    data: Array2<f64>,
}

impl Truth {
    fn load(path: &Path) -> Result<Self> {
        let m = load_matrix(path).stage(|| format!("reading {}", path.display()))?;
        let names: Vec<String> = match meta_value(&m.meta, "columns") {
            Some(c) => c.split(',').map(str::to_string).collect(),
            None => (0..m.data.ncols()).map(|j| format!("col{j}")).collect(),
        };
        if names.len() != m.data.ncols() {
            return Err(Error::invalid_input(format!(
                "{}: {} column names for {} columns",
                path.display(),
                names.len(),
                m.data.ncols()
            )));
        }
        let angular = meta_value(&m.meta, "angular")
            .map(|c| c.split(',').map(str::to_string).collect())
            .unwrap_or_default();
        Ok(Self {
            names,
            angular,
            data: m.data,
        })
    }

    fn column(&self, name: &str) -> Result<Array1<f64>> {
        let j = self.names.iter().position(|n| n == name).ok_or_else(|| {
            Error::invalid_config(format!(
                "no ground-truth column {name:?}; have {}",
                self.names.join(",")
            ))
        })?;
        Ok(self.data.column(j).to_owned())
    }

    fn is_angular(&self, name: &str) -> bool {
        self.angular.iter().any(|n| n == name)
    }
}

fn load_embedding(path: &Path) -> Result<MatrixFile> {
    load_matrix(path).stage(|| format!("reading {}", path.display()))
}

fn check_rows(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::invalid_input(format!(
            "{what} has {got} rows but the embedding has {want}"
        )));
    }
    Ok(())
}

pub(super) fn eval(a: EvalArgs) -> Result<()> {
    let flags = vec![
        ("k", a.k),
        ("repeats", a.repeats),
        ("train_fraction", a.train_fraction),
        ("seed", a.seed),
        ("bins", a.bins),
        ("label", a.label),
    ];
    let s = Settings::resolve(EVAL_KEYS, a.config.as_deref(), &flags)?;
    let knn = KnnConfig {
        k: s.get("k")?,
        repeats: s.get("repeats")?,
        train_fraction: s.get("train_fraction")?,
        seed: s.get("seed")?,
    };
    let bins: usize = s.get("bins")?;
    let label: String = s.get("label")?;
    let mut manifest = Manifest::new("eval", &s);
    let emb = load_embedding(&a.embedding)?;
    manifest.input(&a.embedding)?;
    let truth = Truth::load(&a.truth)?;
    manifest.input(&a.truth)?;
    check_rows("ground truth", truth.data.nrows(), emb.data.nrows())?;
    if !truth.is_angular(&label) {
        truth.column(&label)?;
        return Err(s.context(
            "label",
            Error::invalid_config("the class label must be an angle column"),
        ));
    }
    if bins < 2 {
        return Err(s.context("bins", Error::invalid_config("need at least 2 bins")));
    }

    let mut lines = vec![
        format!("embedding={}", a.embedding.display()),
        format!("dim={}", emb.data.ncols()),
    ];
    // metric,target,value rows for the CSV sidecar.
    let mut scores = vec!["metric,target,value".to_string()];
    for name in &truth.names {
        let col = truth.column(name)?;
        let score = if truth.is_angular(name) {
            angle_recovery_r2(&emb.data, &col, name)?
        } else {
            scalar_recovery_r2(&emb.data, &col, name)?
        };
        lines.push(format!("r2.{name}={:.6}", score.r_squared));
        scores.push(format!("r2,{name},{}", format_value(score.r_squared)));
        if score.rank_deficient {
            lines.push(format!("rank_deficient.{name}=true"));
        }
    }
    let labels = quantize_angle(&truth.column(&label)?, bins);
    let report = knn_classify(&emb.data, &labels, &knn)?;
    lines.push(format!("knn.label={label}"));
    lines.push(format!("knn.bins={bins}"));
    lines.push(format!("knn.k={}", report.k));
    lines.push(format!("knn.total_error={:.6}", report.total_error));
    lines.push(format!("knn.total_std={:.6}", report.total_std));
    scores.push(format!(
        "knn_error,total,{}",
        format_value(report.total_error)
    ));
    scores.push(format!("knn_std,total,{}", format_value(report.total_std)));
    for (c, err) in report.classes.iter().zip(report.per_class_error.iter()) {
        lines.push(format!("knn.class_error.{c}={err:.6}"));
        scores.push(format!("knn_class_error,{c},{}", format_value(*err)));
    }
    let text = lines.join("\n") + "\n";
    print!("{text}");
    if let Some(out) = &a.out {
        fs::write(out, &text)?;
        let csv = sidecar(out, "scores.csv");
        fs::write(&csv, scores.join("\n") + "\n")?;
        manifest.output(out);
        manifest.output(&csv);
        manifest.write(&sidecar(out, "manifest.txt"))?;
    }
    Ok(())
}

pub(super) fn plot(a: PlotArgs) -> Result<()> {
    let flags = vec![
        ("x", a.x),
        ("y", a.y),
        ("color_by", a.color_by),
        ("ramp", a.ramp),
    ];
    let s = Settings::resolve(PLOT_KEYS, a.config.as_deref(), &flags)?;
    let (xc, yc): (usize, usize) = (s.get("x")?, s.get("y")?);
    let color_by: String = s.get("color_by")?;
    let mut manifest = Manifest::new("plot", &s);
    let emb = load_embedding(&a.embedding)?;
    manifest.input(&a.embedding)?;
    let d = emb.data.ncols();
    for (k, c) in [("x", xc), ("y", yc)] {
        if c >= d {
            return Err(s.context(
                k,
                Error::invalid_config(format!(
                    "column {c} out of range for a {d}-column embedding"
                )),
            ));
        }
    }
    let n = emb.data.nrows();
    let fills = if color_by == "none" {
        vec!["#3b528b".to_string(); n]
    } else {
        let tpath = a
            .truth
            .as_ref()
            .ok_or_else(|| Error::invalid_config("--color-by needs --truth <ground truth file>"))?;
        let truth = Truth::load(tpath)?;
        manifest.input(tpath)?;
        check_rows("ground truth", truth.data.nrows(), n)?;
        let values = truth
            .column(&color_by)
            .map_err(|e| s.context("color_by", e))?;
        let ramp = match s.raw("ramp") {
            "auto" if truth.is_angular(&color_by) => Ramp::Cyclic,
            "auto" => Ramp::Sequential,
            _ => s.get::<Ramp>("ramp")?,
        };
        svg::colors(values.as_slice().expect("owned column is contiguous"), ramp)
    };
    let x: Vec<f64> = emb.data.column(xc).to_vec();
    let y: Vec<f64> = emb.data.column(yc).to_vec();
    let title = format!("{} coordinates {xc} and {yc}", a.embedding.display());
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    fs::write(&a.out, svg::scatter(&x, &y, &fills, &title))?;
    manifest.output(&a.out);
    manifest.write(&sidecar(&a.out, "manifest.txt"))
}

pub(super) fn distances(a: DistancesArgs) -> Result<()> {
    let mut flags = vec![("kind", a.kind), ("sensor", a.sensor), ("pair", a.pair)];
    flags.extend(fusion_flags(a.fusion));
    let s = Settings::resolve(
        &keys(&[DISTANCE_KEYS, FUSION_KEYS]),
        a.config.as_deref(),
        &flags,
    )?;
    let mut cfg = fusion_config(&s)?;
    let kind: String = s.get("kind")?;
    let mut manifest = Manifest::new("distances", &s);
    let data = load_dataset(&a.data, &mut manifest)?;
    let m = data.n_sensors();
    let sensor = || -> Result<usize> {
        let i: usize = s.get("sensor")?;
        if i == 0 || i > m {
            return Err(s.context(
                "sensor",
                Error::invalid_config(format!("sensor must be in 1..={m}")),
            ));
        }
        Ok(i - 1)
    };
    let d: DistanceMatrix<f64> = match kind.as_str() {
        "euclidean" => euclidean_distance_matrix(&data.sensors[sensor()?])?,
        "mahalanobis" => {
            let x = &data.sensors[sensor()?];
            let maha = cfg.mahalanobis;
            let rank = maha.rank.unwrap_or(x.dim().min(maha.k_nn - 1));
            let c = local_covariances(x, maha.k_nn, maha.shrinkage, rank)?;
            mahalanobis_distance_matrix(x, &c)?
        }
        "diffusion" => {
            let i = sensor()?;
            let k = sensor_operator(&data.sensors[i], cfg.multiplier(i, m)?, cfg.sensor_metric, &cfg.mahalanobis)?;
            let phi = stationary_distribution(&k)?;
            diffusion_distance(&k, cfg.t, &phi)?
        }
        "ad" => {
            let (p, q) = s.parse_with("pair", parse_pair)?;
            if p >= m || q >= m || p == q {
                return Err(s.context("pair", Error::invalid_config(format!("pair must be two distinct sensors in 1..={m}"))));
            }
            let kp = sensor_operator(&data.sensors[p], cfg.multiplier(p, m)?, cfg.sensor_metric, &cfg.mahalanobis)?;
            let kq = sensor_operator(&data.sensors[q], cfg.multiplier(q, m)?, cfg.sensor_metric, &cfg.mahalanobis)?;
            ad_distance(&ad_operator(&kp, &kq, (p, q))?, cfg.t)?
        }
        "common" => union_distance(&data, &cfg)?,
        "common-mahalanobis" => {
            cfg.union = UnionVariant::MahalanobisUnion;
            union_distance(&data, &cfg)?
        }
        other => {
            return Err(s.context(
                "kind",
                Error::invalid_config(format!(
                    "unknown kind {other:?}; expected euclidean, mahalanobis, diffusion, ad, common or common-mahalanobis"
                )),
            ))
        }
    };
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    save_matrix(&a.out, &d.values, d.kind.tag(), &[])?;
    manifest.output(&a.out);
    manifest.write(&sidecar(&a.out, "manifest.txt"))?;
    if a.check {
        let r = check_metric_properties(&d, TripleSampling::Auto { seed: cfg.seed });
        println!("triples_checked={}", r.triples_checked);
        println!("max_diagonal={:e}", r.max_diagonal);
        println!("max_asymmetry={:e}", r.max_asymmetry);
        println!("min_entry={:e}", r.min_entry);
        println!("max_triangle_violation={:e}", r.max_triangle_violation);
        println!(
            "metric_check={}",
            if r.passes(1e-9) { "pass" } else { "fail" }
        );
    }
    Ok(())
}
