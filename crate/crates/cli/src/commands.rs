use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cryptbench::diffcrypt::{
    build_ddt, differential_attack, feistel32_characteristic, generate_chosen_pairs, spn_characteristic,
    DiffAttackConfig, DifferentialCharacteristic,
};
use cryptbench::evolve::benchmark::{decode, demo_config, run_benchmark};
use cryptbench::finite_math::rijndael_sbox;
use cryptbench::finite_math::Gf256;
use cryptbench::ga_attack::{ga_differential_attack, GaAttackConfig};
use cryptbench::icrypt::{
    icrypt_core, icrypt_key_schedule, quality_harness, Icrypt, IcryptParams, KeyInjection, QualityConfig,
    DEFAULT_DESIGN_SEED,
};
use cryptbench::interpolation::{chosen_plaintexts, interpolation_attack, probe_degree, InterpAttackConfig};
use cryptbench::modes::{mode_decrypt, mode_encrypt, BitStream, Mode, ModeState};
use cryptbench::nn_attack::{collect_pairs, error_curve_export, nn_key_ranking_attack, NnAttackConfig};
use cryptbench::report::{
    characteristic_table, ddt_table, emit_report, ga_attack_table, ga_run_table, key_count_table, ReportFormat, Table,
};
use cryptbench::toyciphers::{BasicSpn, BlockCipher, CubeCipher, Feistel32, HypCipher, LastRoundTarget, SPN_SBOXES};

use crate::{
    BlockArgs, CipherArgs, Cli, Command, DiffArgs, GaDemoArgs, IcryptAction, IcryptOpts, InterpArgs, ModesArgs, NnArgs,
    QualityArgs, SboxAction,
};

/// Files produced by a command, in print order.
struct Output {
    files: Vec<(String, Vec<u8>)>,
    seed: Option<u64>,
}

impl Output {
    fn one(name: &str, body: impl Into<Vec<u8>>) -> Output {
        Output { files: vec![(name.to_string(), body.into())], seed: None }
    }

    fn text(files: Vec<(String, String)>) -> Output {
        Output { files: files.into_iter().map(|(n, b)| (n, b.into_bytes())).collect(), seed: None }
    }

    fn seeded(mut self, seed: u64) -> Output {
        self.seed = Some(seed);
        self
    }
}

pub fn run(cli: &Cli, argv: &[String]) -> Result<()> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().map_err(|e| anyhow!("--workers: {e}"))?;
    }
    let format: ReportFormat = cli.format.parse().map_err(|e: String| anyhow!("--format: {e}"))?;
    let start = Instant::now();
    let (name, out) = dispatch(&cli.command, format)?;
    let elapsed = start.elapsed();
    let manifest = crate::manifest::build(name, argv, out.seed, elapsed, &out.files);
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating --out {}", dir.display()))?;
            for (file, body) in &out.files {
                fs::write(dir.join(file), body).with_context(|| format!("writing {file}"))?;
            }
            fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            for (_, body) in &out.files {
                stdout.write_all(body)?;
            }
            stdout.flush()?;
            eprintln!("manifest: {manifest}");
        }
    }
    Ok(())
}

fn dispatch(cmd: &Command, format: ReportFormat) -> Result<(&'static str, Output)> {
    Ok(match cmd {
        Command::Sbox { action } => ("sbox", sbox(action, format)?),
        Command::Encrypt(a) => ("encrypt", block(a, true)?),
        Command::Decrypt(a) => ("decrypt", block(a, false)?),
        Command::Modes(a) => ("modes", modes(a)?),
        Command::Ddt { sbox } => {
            let idx = spn_box_index(sbox)?;
            let t = ddt_table(&build_ddt(sbox, &SPN_SBOXES[idx]));
            ("ddt", Output::one(&format!("ddt.{}", ext(format)), emit_report(&t, format)))
        }
        Command::Char { cipher } => {
            let (ch, digits) = characteristic(cipher)?;
            let t = characteristic_table(&ch, digits);
            ("char", Output::one(&format!("char.{}", ext(format)), emit_report(&t, format)))
        }
        Command::DiffAttack(a) => ("diff-attack", diff_attack(a, format)?),
        Command::GaDemo(a) => ("ga-demo", ga_demo(a, format)?),
        Command::GaAttack(a) => ("ga-attack", ga_attack(a, format)?),
        Command::NnAttack(a) => ("nn-attack", nn_attack(a)?),
        Command::InterpAttack(a) => ("interp-attack", interp_attack(a, format)?),
        Command::Icrypt { action } => ("icrypt", icrypt(action, format)?),
        Command::Quality(a) => ("quality", quality(a)?),
    })
}

fn ext(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Csv => "csv",
        ReportFormat::Markdown => "md",
    }
}

fn seed_or_fresh(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

pub fn parse_hex(arg: &str, value: &str, bits: u32) -> Result<u64> {
    let v = value.trim().trim_start_matches("0x").trim_start_matches("0X");
    let n = u64::from_str_radix(v, 16).map_err(|_| anyhow!("invalid hex value {value:?} for --{arg}"))?;
    if bits < 64 && n >> bits != 0 {
        bail!("--{arg}: {value} does not fit in {bits} bits");
    }
    Ok(n)
}

fn parse_hex_list(arg: &str, value: &str, bits: u32) -> Result<Vec<u64>> {
    value.split(',').map(|s| parse_hex(arg, s, bits)).collect()
}

fn parse_hex_bytes(arg: &str, value: &str) -> Result<Vec<u8>> {
    let v: String = value.chars().filter(|c| !c.is_whitespace()).collect();
    if v.len() % 2 != 0 {
        bail!("--{arg}: odd number of hex digits");
    }
    (0..v.len())
        .step_by(2)
        .map(|i| u8::from_str_radix(&v[i..i + 2], 16).map_err(|_| anyhow!("invalid hex value {value:?} for --{arg}")))
        .collect()
}

fn spn_box_index(id: &str) -> Result<usize> {
    let digits: Vec<u32> = id.trim_start_matches(['S', 's']).chars().filter_map(|c| c.to_digit(10)).collect();
    match digits.as_slice() {
        [r @ 1..=4, j @ 1..=4] if id.len() == 3 => Ok((4 * (r - 1) + (j - 1)) as usize),
        _ => bail!("--sbox: expected S<round><box> with both in 1..4, got {id:?}"),
    }
}

fn hex_grid(table: &[u8; 256], format: ReportFormat) -> String {
    let mut headers = vec![String::new()];
    headers.extend((0..16).map(|c| format!("{c:X}")));
    let mut t = Table { headers, rows: Vec::new() };
    for r in 0..16 {
        let mut row = vec![format!("{r:X}")];
        row.extend((0..16).map(|c| format!("{:02X}", table[16 * r + c])));
        t.push(row);
    }
    emit_report(&t, format)
}

fn sbox(action: &SboxAction, format: ReportFormat) -> Result<Output> {
    let SboxAction::Dump { inverse, spn } = action;
    let body = match spn {
        Some(id) => {
            let b = SPN_SBOXES[spn_box_index(id)?];
            let vals: Vec<u8> = if *inverse {
                let mut inv = [0u8; 16];
                for (x, &y) in b.iter().enumerate() {
                    inv[y as usize] = x as u8;
                }
                inv.to_vec()
            } else {
                b.to_vec()
            };
            let mut t = Table::new((0..16).map(|x| format!("{x:X}")));
            t.push(vals.iter().map(|v| format!("{v:X}")).collect());
            emit_report(&t, format)
        }
        None => {
            let s = rijndael_sbox();
            hex_grid(if *inverse { &s.inverse } else { &s.forward }, format)
        }
    };
    Ok(Output::one(&format!("sbox.{}", ext(format)), body))
}

fn icrypt_params(opts: &IcryptOpts) -> Result<IcryptParams> {
    let variant: KeyInjection = opts.variant.parse().map_err(|e: String| anyhow!("--variant: {e}"))?;
    let seed = match std::env::var("ICRYPT_DESIGN_SEED") {
        Ok(s) => s.parse().map_err(|_| anyhow!("ICRYPT_DESIGN_SEED is not an integer: {s:?}"))?,
        Err(_) => DEFAULT_DESIGN_SEED,
    };
    IcryptParams::generate(variant, 32, opts.rounds, opts.simplified, seed).map_err(|e| anyhow!("--rounds: {e}"))
}

fn build_cipher(args: &CipherArgs, rng: Option<&mut ChaCha8Rng>) -> Result<Box<dyn BlockCipher>> {
    let key = |bits: u32, count: std::ops::RangeInclusive<usize>, rng: Option<&mut ChaCha8Rng>| -> Result<Vec<u64>> {
        match (&args.key, rng) {
            (Some(k), _) => {
                let v = parse_hex_list("key", k, bits)?;
                if !count.contains(&v.len()) {
                    bail!("--key: {} needs {:?} subkeys, got {}", args.cipher, count, v.len());
                }
                Ok(v)
            }
            (None, Some(rng)) => Ok((0..*count.end()).map(|_| rng.gen::<u64>() >> (64 - bits)).collect()),
            (None, None) => bail!("--key is required for {}", args.cipher),
        }
    };
    Ok(match args.cipher.as_str() {
        "spn" => {
            let k = key(16, 5..=5, rng)?;
            Box::new(BasicSpn::new([k[0] as u16, k[1] as u16, k[2] as u16, k[3] as u16, k[4] as u16]))
        }
        "feistel32" => {
            let k = key(16, 4..=4, rng)?;
            Box::new(Feistel32::new([k[0] as u16, k[1] as u16, k[2] as u16, k[3] as u16]))
        }
        "hyp" => {
            let k: Vec<u8> = key(8, 2..=4, rng)?.into_iter().map(|x| x as u8).collect();
            Box::new(HypCipher::new(&k)?)
        }
        "cube" => {
            let k: Vec<u8> = key(8, 2..=3, rng)?.into_iter().map(|x| x as u8).collect();
            Box::new(CubeCipher::new(&k)?)
        }
        "icrypt" => {
            let k = key(64, 1..=1, rng)?;
            Box::new(Icrypt::new64(&icrypt_params(&args.icrypt)?, k[0]))
        }
        other => bail!("--cipher: unknown cipher {other:?}"),
    })
}

fn block(a: &BlockArgs, encrypt: bool) -> Result<Output> {
    let c = build_cipher(&a.cipher, None)?;
    let x = parse_hex("input", &a.input, c.block_bits())?;
    let y = if encrypt { c.encrypt_block(x) } else { c.decrypt_block(x) };
    let digits = c.block_bits().div_ceil(4) as usize;
    Ok(Output::one("block.txt", format!("{y:0digits$X}\n")))
}

fn modes(a: &ModesArgs) -> Result<Output> {
    let c = build_cipher(&a.cipher, None)?;
    let mode: Mode = a.mode.parse().map_err(|e: String| anyhow!("--mode: {e}"))?;
    let iv = a.iv.as_deref().map(|v| parse_hex("iv", v, c.block_bits())).transpose()?;
    let st = ModeState::new(mode, iv, a.segment_bits.unwrap_or(c.block_bits()));
    let bytes = match &a.input {
        Some(hex) => parse_hex_bytes("input", hex)?,
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf).context("reading stdin")?;
            buf
        }
    };
    let input = BitStream::from_bytes(&bytes);
    let out = if a.decrypt { mode_decrypt(&st, &*c, &input) } else { mode_encrypt(&st, &*c, &input) }?;
    if a.input.is_some() {
        let hex: String = out.as_bytes().iter().map(|b| format!("{b:02X}")).collect();
        Ok(Output::one("modes.txt", hex + "\n"))
    } else {
        Ok(Output::one("modes.bin", out.as_bytes().to_vec()))
    }
}

fn characteristic(cipher: &str) -> Result<(DifferentialCharacteristic, usize)> {
    match cipher {
        "spn" => Ok((spn_characteristic(), 4)),
        "feistel32" => Ok((feistel32_characteristic(), 8)),
        other => bail!("--cipher: no built-in characteristic for {other:?}"),
    }
}

enum Target {
    Spn(BasicSpn),
    Feistel(Feistel32),
}

impl Target {
    fn new(a: &DiffArgs, rng: &mut ChaCha8Rng) -> Result<(Target, u64)> {
        let n = match a.cipher.as_str() {
            "spn" => 5,
            "feistel32" => 4,
            other => bail!("--cipher: attacks support spn and feistel32, got {other:?}"),
        };
        let keys: Vec<u16> = match &a.key {
            Some(k) => parse_hex_list("key", k, 16)?.into_iter().map(|x| x as u16).collect(),
            None => (0..n).map(|_| rng.gen()).collect(),
        };
        if keys.len() != n {
            bail!("--key: {} needs {n} subkeys, got {}", a.cipher, keys.len());
        }
        Ok(if n == 5 {
            (Target::Spn(BasicSpn::new([keys[0], keys[1], keys[2], keys[3], keys[4]])), keys[4] as u64)
        } else {
            (Target::Feistel(Feistel32::new([keys[0], keys[1], keys[2], keys[3]])), keys[3] as u64)
        })
    }

    fn as_target(&self) -> &dyn LastRoundTarget {
        match self {
            Target::Spn(c) => c,
            Target::Feistel(c) => c,
        }
    }
}

fn diff_setup(
    a: &DiffArgs,
) -> Result<(u64, Target, u64, DifferentialCharacteristic, usize, Vec<cryptbench::diffcrypt::ChosenPair>)> {
    let seed = seed_or_fresh(a.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (target, true_key) = Target::new(a, &mut rng)?;
    let (ch, digits) = characteristic(&a.cipher)?;
    let n = a.pairs.unwrap_or_else(|| cryptbench::diffcrypt::pairs_for_rule(a.rule_c, ch.probability));
    let pairs = generate_chosen_pairs(target.as_target(), ch.input_difference, n, &mut rng);
    let subkey_digits = if matches!(target, Target::Spn(_)) { 4 } else { digits / 2 };
    Ok((seed, target, true_key, ch, subkey_digits, pairs))
}

fn diff_attack(a: &DiffArgs, format: ReportFormat) -> Result<Output> {
    let (seed, target, true_key, ch, digits, pairs) = diff_setup(a)?;
    let cipher = target.as_target();
    let cfg =
        DiffAttackConfig { pair_count: pairs.len(), ..DiffAttackConfig::from_rule(ch.clone(), a.rule_c, u64::MAX) };
    let ranking = differential_attack(cipher, &cfg, &pairs)?;
    let rank = ranking.iter().position(|k| k.key == true_key).unwrap() + 1;
    let top = ranking[0].count;
    let tdiff = ch.target_difference();
    let success = ranking.iter().find(|k| k.key == true_key).unwrap().count == top
        && ranking
            .iter()
            .take_while(|k| k.count == top)
            .all(|k| cipher.guesses_indistinguishable(k.key, true_key, tdiff));
    let mut summary = Table::new(["pairs", "true_key", "true_rank", "recovered", "success"]);
    summary.push(vec![
        pairs.len().to_string(),
        format!("{true_key:0digits$X}"),
        rank.to_string(),
        format!("{:0digits$X}", ranking[0].key),
        success.to_string(),
    ]);
    Ok(Output::text(vec![
        (format!("ranking.{}", ext(format)), emit_report(&key_count_table(&ranking, digits, a.top), format)),
        (format!("summary.{}", ext(format)), emit_report(&summary, format)),
    ])
    .seeded(seed))
}

fn ga_attack(a: &DiffArgs, format: ReportFormat) -> Result<Output> {
    let (seed, target, true_key, ch, digits, pairs) = diff_setup(a)?;
    let cipher = target.as_target();
    let cfg = GaAttackConfig::with_defaults(ch.clone(), cipher.last_round_key_bits(), seed);
    let result = ga_differential_attack(cipher, &cfg, &pairs)?;
    let matched = result.matches(cipher, true_key, ch.target_difference());
    let mut summary = Table::new(["recovered", "true", "match", "keys_evaluated", "stopped_early"]);
    summary.push(vec![
        format!("{:0digits$X}", result.recovered),
        format!("{true_key:0digits$X}"),
        matched.to_string(),
        result.keys_evaluated.to_string(),
        result.stopped_early.to_string(),
    ]);
    Ok(Output::text(vec![
        (format!("generations.{}", ext(format)), emit_report(&ga_attack_table(&result, digits), format)),
        (format!("summary.{}", ext(format)), emit_report(&summary, format)),
    ])
    .seeded(seed))
}

fn ga_demo(a: &GaDemoArgs, format: ReportFormat) -> Result<Output> {
    let seed = seed_or_fresh(a.seed);
    let cfg = cryptbench::evolve::GaConfig {
        population_size: a.population,
        max_generations: a.generations,
        crossover_probability: a.pc,
        mutation_probability: a.pm,
        ..demo_config(seed)
    };
    let run = run_benchmark(&cfg)?;
    let (x1, x2) = decode(run.best.bits);
    let mut summary = Table::new(["best_fitness", "x1", "x2", "evaluations"]);
    summary.push(vec![
        format!("{:.4}", run.best.fitness),
        format!("{x1:.4}"),
        format!("{x2:.4}"),
        run.evaluations.to_string(),
    ]);
    Ok(Output::text(vec![
        (format!("trace.{}", ext(format)), emit_report(&ga_run_table(&run), format)),
        (format!("summary.{}", ext(format)), emit_report(&summary, format)),
    ])
    .seeded(seed))
}

fn nn_attack(a: &NnArgs) -> Result<Output> {
    let seed = seed_or_fresh(a.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<u8> = match &a.key {
        Some(k) => parse_hex_list("key", k, 8)?.into_iter().map(|x| x as u8).collect(),
        None => (0..a.rounds).map(|_| rng.gen()).collect(),
    };
    if keys.len() != a.rounds {
        bail!("--key: {} rounds need {} round keys, got {}", a.rounds, a.rounds, keys.len());
    }
    let cipher = HypCipher::new(&keys)?;
    let mut cfg = NnAttackConfig::new(a.rounds, seed);
    if a.hidden2 {
        cfg.hidden_layers = 2;
    }
    if let Some(e) = a.epochs {
        cfg.epochs = e;
    }
    if let Some(h) = a.hidden_size {
        cfg.hidden_size = h;
    }
    let pairs = collect_pairs(&cipher, cfg.example_count(), &mut rng);
    let table = nn_key_ranking_attack(&cipher, &cfg, &pairs)?;
    let truth = keys[a.rounds - 1] as u64;
    let summary =
        format!("argmin,true,match,margin\n{},{},{},{:.6}\n", table.argmin, truth, table.argmin == truth, table.margin);
    Ok(Output::text(vec![("error_curve.csv".into(), error_curve_export(&table)), ("summary.csv".into(), summary)])
        .seeded(seed))
}

fn interp_attack(a: &InterpArgs, format: ReportFormat) -> Result<Output> {
    let seed = seed_or_fresh(a.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<u8> = match &a.key {
        Some(k) => parse_hex_list("key", k, 8)?.into_iter().map(|x| x as u8).collect(),
        None => (0..a.rounds).map(|_| rng.gen()).collect(),
    };
    let cipher = CubeCipher::new(&keys)?;
    let left = parse_hex("left", &a.left, 8)? as u8;
    let pts = chosen_plaintexts(left, 256);
    let pairs: Vec<(u64, u64)> = pts.iter().map(|&p| (p, cipher.encrypt_block(p))).collect();
    let truth = *keys.last().unwrap() as u64;
    let degree = match a.degree {
        Some(d) => d,
        None => {
            let pts: Vec<(Gf256, Gf256)> = pairs
                .iter()
                .map(|&(p, c)| (Gf256(p as u8), Gf256((cipher.partial_decrypt_last_round(c, truth) >> 8) as u8)))
                .collect();
            probe_degree(&pts)?
        }
    };
    let cfg = InterpAttackConfig::new(degree);
    let result = interpolation_attack(&cipher, &cfg, &pairs)?;
    let survivors: Vec<u64> = result.iter().filter(|s| s.survived).map(|s| s.key).collect();
    let mut t = Table::new(["key"]);
    for k in &survivors {
        t.push(vec![format!("{k:02X}")]);
    }
    let mut summary = Table::new(["degree", "pairs", "survivors", "true_key", "true_survives"]);
    summary.push(vec![
        degree.to_string(),
        cfg.pairs_needed().to_string(),
        survivors.len().to_string(),
        format!("{truth:02X}"),
        survivors.contains(&truth).to_string(),
    ]);
    Ok(Output::text(vec![
        (format!("survivors.{}", ext(format)), emit_report(&t, format)),
        (format!("summary.{}", ext(format)), emit_report(&summary, format)),
    ])
    .seeded(seed))
}

fn icrypt(action: &IcryptAction, format: ReportFormat) -> Result<Output> {
    match action {
        IcryptAction::Enc(b) | IcryptAction::Dec(b) => {
            let p = icrypt_params(&b.opts)?;
            let key = parse_hex("key", &b.key, 64)?;
            let x = parse_hex("input", &b.input, 64)?;
            let c = Icrypt::new64(&p, key);
            let y = if matches!(action, IcryptAction::Enc(_)) { c.encrypt_block(x) } else { c.decrypt_block(x) };
            Ok(Output::one("block.txt", format!("{y:016X}\n")))
        }
        IcryptAction::Schedule { key, opts } => {
            let p = icrypt_params(opts)?;
            let key = parse_hex("key", key, 64)?;
            let s = icrypt_key_schedule(((key >> 32) as u128, (key as u32) as u128), &p);
            let mut t = Table::new(["round", "key"]);
            for (i, k) in s.round_keys.iter().enumerate() {
                t.push(vec![(i + 1).to_string(), format!("{k:08X}")]);
            }
            Ok(Output::one(&format!("schedule.{}", ext(format)), emit_report(&t, format)))
        }
        IcryptAction::Quality { target, key, samples, seed, opts } => {
            let seed = seed_or_fresh(*seed);
            let p = icrypt_params(opts)?;
            let key = parse_hex("key", key, 64)?;
            let cfg = QualityConfig::new(*samples, seed);
            let report = match target.as_str() {
                "core" => {
                    let k = (key as u32) as u128;
                    quality_harness(|x| icrypt_core(x ^ k, k, &p), 32, 32, &cfg)?
                }
                "cipher" => {
                    let c = Icrypt::new64(&p, key);
                    quality_harness(|x| c.encrypt(x), 64, 64, &cfg)?
                }
                other => bail!("--target: expected core or cipher, got {other:?}"),
            };
            Ok(Output::text(vec![("summary.csv".into(), report.summary_csv()), ("sac.csv".into(), report.sac_csv())])
                .seeded(seed))
        }
        IcryptAction::Kat { count, seed, opts } => {
            let seed = seed_or_fresh(*seed);
            let p = icrypt_params(opts)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = String::from("key,plaintext,ciphertext\n");
            for _ in 0..*count {
                let (k, x): (u64, u64) = (rng.gen(), rng.gen());
                let y = Icrypt::new64(&p, k).encrypt_block(x);
                writeln!(s, "{k:016X},{x:016X},{y:016X}").unwrap();
            }
            Ok(Output::one("kat.csv", s).seeded(seed))
        }
    }
}

fn quality(a: &QualityArgs) -> Result<Output> {
    let seed = seed_or_fresh(a.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = build_cipher(&a.cipher, Some(&mut rng))?;
    let n = c.block_bits();
    let report = quality_harness(|x| c.encrypt_block(x as u64) as u128, n, n, &QualityConfig::new(a.samples, seed))?;
    Ok(Output::text(vec![("summary.csv".into(), report.summary_csv()), ("sac.csv".into(), report.sac_csv())])
        .seeded(seed))
}
