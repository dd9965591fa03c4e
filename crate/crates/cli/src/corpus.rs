//! Line-delimited regression corpora.
//!
//! One identity per line, pipe-separated: `mode|type|lattice|…` with a
//! mode-specific payload; blank lines and `#` comments are skipped. Each
//! record is self-contained (candidate radii and cutoffs travel with the
//! record, not with flags), so a corpus means the same thing on every
//! machine and the report is byte-identical across runs and thread counts.
//!
//! Modes:
//!
//! | mode               | payload                          | passes when |
//! |--------------------|----------------------------------|-------------|
//! | `hecke-eq`         | `lhs\|rhs`                       | normal forms agree |
//! | `braid-eq`         | `word\|word`                     | Hecke images agree |
//! | `asp-eq`           | `sgn\|h\|m\|expected`            | `h·m` comes out as stated |
//! | `decat-eq`         | `word\|ball\|expected`           | bimodule class agrees |
//! | `decat-complex-eq` | `braid word\|ball\|expected`     | complex class agrees |
//! | `crosscheck`       | `indices\|omega\|ball`           | both routes agree |
//! | `complex-eq`       | `word\|word`                     | minimal complexes isomorphic |
//! | `rank-eq`          | `word\|scalar`                   | graded rank agrees |
//! | `census-eq`        | `word\|ball\|census`             | filtration multiset agrees |
//! | `bimod-iso`        | `word\|word`                     | an isomorphism exists |
//! | `hom-zero`         | `word\|word\|cutoff`             | all hom dimensions vanish |
//! | `uzero-eq`         | `word\|word`                     | u=0 presentations agree |
//! | `order-min`        | `ball`                           | order minima are the Ω-reps |
//! | `lift-len`         | `ball`                           | lift lengths match |
//!
//! Census payloads are space-separated `element@degree` entries, e.g.
//! `e@0 s1@2`.

use affhecke::affweyl::{
    coxeter_length, positive_lift, validate_word, AffineWeylElement, BraidLetter, BraidWord,
};
use affhecke::bimod::{
    bimodules_isomorphic, default_candidates, hom_degree_zero, standard_filtration,
    translation_candidates, GradedBimodule,
};
use affhecke::decat::{cross_check_asp, decat_bimodule, decat_complex};
use affhecke::hecke::{asp_act, braid_image, AspElement, SgnConvention};
use affhecke::homotopy::{verify_braid_relation, word_complex, BraidReport};
use affhecke::laurent::LaurentScalar;
use affhecke::rootdata::{Lattice, RootDatum, RootSystemType, Weight};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::str::FromStr;

use crate::grammar::{
    build_bimod_word, parse_affine, parse_bimod_word, parse_character, parse_element,
    parse_index_word, parse_scalar, parse_weight, show_affine, show_element,
};
use crate::CliError;

/// Result of one corpus record.
#[derive(Debug, Clone)]
pub struct RecordOutcome {
    pub line_no: usize,
    pub mode: String,
    pub passed: bool,
    pub detail: String,
    pub text: String,
}

impl RecordOutcome {
    pub fn report_line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "corpus line={} mode={} status={} {}",
            self.line_no, self.mode, status, self.detail
        );
        if !self.passed {
            line.push_str(&format!(" record=\"{}\"", self.text));
        }
        line
    }
}

/// All record results plus pass/fail totals, in input order.
#[derive(Debug, Clone, Default)]
pub struct CorpusOutcome {
    pub records: Vec<RecordOutcome>,
    pub passed: usize,
    pub failed: usize,
}

/// Run every record of a corpus; `jobs` bounds the worker threads. Records
/// evaluate independently and the report is assembled in line order, so the
/// output does not depend on the thread count.
pub fn run_corpus(text: &str, jobs: usize) -> Result<CorpusOutcome, CliError> {
    let records: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let outcomes: Vec<RecordOutcome> = if jobs <= 1 {
        records
            .iter()
            .map(|&(n, t)| eval_record(n, t))
            .collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        pool.install(|| {
            records
                .par_iter()
                .map(|&(n, t)| eval_record(n, t))
                .collect::<Result<_, _>>()
        })?
    };
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let failed = outcomes.len() - passed;
    Ok(CorpusOutcome {
        records: outcomes,
        passed,
        failed,
    })
}

fn eval_record(line_no: usize, text: &str) -> Result<RecordOutcome, CliError> {
    let fields: Vec<&str> = text.split('|').map(str::trim).collect();
    let mode = fields[0].to_string();
    let (passed, detail) = eval_fields(&fields).map_err(|e| CliError::Record {
        line: line_no,
        source: Box::new(e),
    })?;
    Ok(RecordOutcome {
        line_no,
        mode,
        passed,
        detail,
        text: text.to_string(),
    })
}

fn parse_sgn(text: &str) -> Result<SgnConvention, CliError> {
    match text {
        "minus-one" => Ok(SgnConvention::MinusOne),
        "q" => Ok(SgnConvention::Q),
        other => Err(CliError::Usage(format!(
            "unknown sgn convention `{other}` (use `minus-one` or `q`)"
        ))),
    }
}

fn parse_int<T: FromStr>(text: &str, what: &str) -> Result<T, CliError> {
    text.parse::<T>()
        .map_err(|_| CliError::Usage(format!("expected an integer {what}, found `{text}`")))
}

fn record_datum(fields: &[&str]) -> Result<RootDatum, CliError> {
    let system = fields[1]
        .parse::<RootSystemType>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let lattice = fields[2]
        .parse::<Lattice>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(RootDatum::new(system, lattice))
}

fn build(datum: &RootDatum, text: &str) -> Result<GradedBimodule, CliError> {
    build_bimod_word(datum, &parse_bimod_word(datum, text)?)
}

fn braid(datum: &RootDatum, text: &str) -> Result<BraidWord, CliError> {
    let word = BraidWord::from_str(text)?;
    validate_word(datum, &word)?;
    Ok(word)
}

/// `element@degree` entries joined by spaces; `-` when empty.
pub fn show_census(census: &[(AffineWeylElement, i64)]) -> String {
    if census.is_empty() {
        return "-".into();
    }
    census
        .iter()
        .map(|(g, d)| format!("{}@{}", show_affine(g), d))
        .collect::<Vec<_>>()
        .join(" ")
}

fn census_key(census: &[(AffineWeylElement, i64)]) -> Vec<(i64, String)> {
    let mut v: Vec<(i64, String)> = census
        .iter()
        .map(|(g, d)| (*d, show_affine(g)))
        .collect();
    v.sort();
    v
}

/// Deterministic part of a relation report: everything except wall-clock
/// time and the witness fingerprint.
pub fn braid_detail(r: &BraidReport) -> String {
    let ranks = |rs: &[(i64, LaurentScalar)]| {
        rs.iter()
            .map(|(n, c)| format!("{n}:{c}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "relation=[{}] iso={} left=[{}] right=[{}] end=({},{})",
        r.relation,
        if r.isomorphic { "yes" } else { "NO" },
        ranks(&r.left_ranks),
        ranks(&r.right_ranks),
        r.left_end_dim,
        r.right_end_dim,
    )
}

fn expect_fields(fields: &[&str], n: usize) -> Result<(), CliError> {
    if fields.len() != n {
        return Err(CliError::Usage(format!(
            "mode `{}` takes {} `|`-separated fields, found {}",
            fields[0],
            n,
            fields.len()
        )));
    }
    Ok(())
}

fn eval_fields(fields: &[&str]) -> Result<(bool, String), CliError> {
    match fields[0] {
        "hecke-eq" => {
            expect_fields(fields, 5)?;
            let d = record_datum(fields)?;
            let lhs = parse_element(&d, fields[3])?;
            let rhs = parse_element(&d, fields[4])?;
            Ok(if lhs == rhs {
                (true, format!("value={}", show_element(&d, &lhs)))
            } else {
                (
                    false,
                    format!(
                        "lhs={} rhs={}",
                        show_element(&d, &lhs),
                        show_element(&d, &rhs)
                    ),
                )
            })
        }
        "braid-eq" => {
            expect_fields(fields, 5)?;
            let d = record_datum(fields)?;
            let lhs = braid_image(&d, &braid(&d, fields[3])?)?;
            let rhs = braid_image(&d, &braid(&d, fields[4])?)?;
            Ok(if lhs == rhs {
                (true, format!("value={}", show_element(&d, &lhs)))
            } else {
                (
                    false,
                    format!(
                        "lhs={} rhs={}",
                        show_element(&d, &lhs),
                        show_element(&d, &rhs)
                    ),
                )
            })
        }
        "asp-eq" => {
            expect_fields(fields, 7)?;
            let d = record_datum(fields)?;
            let conv = parse_sgn(fields[3])?;
            let h = parse_element(&d, fields[4])?;
            let m = AspElement(parse_character(&d, fields[5])?);
            let expected = AspElement(parse_character(&d, fields[6])?);
            let got = asp_act(&d, &h, &m, conv);
            Ok(if got == expected {
                (true, format!("value={got}"))
            } else {
                (false, format!("got={got} expected={expected}"))
            })
        }
        "decat-eq" => {
            expect_fields(fields, 6)?;
            let d = record_datum(fields)?;
            let m = build(&d, fields[3])?;
            let ball: i64 = parse_int(fields[4], "ball")?;
            let expected = parse_element(&d, fields[5])?;
            let class = decat_bimodule(&d, &m, &default_candidates(&d, ball))?;
            Ok(if class.element == expected {
                (true, format!("class={}", show_element(&d, &class.element)))
            } else {
                (
                    false,
                    format!(
                        "class={} expected={}",
                        show_element(&d, &class.element),
                        show_element(&d, &expected)
                    ),
                )
            })
        }
        "decat-complex-eq" => {
            expect_fields(fields, 6)?;
            let d = record_datum(fields)?;
            let word = braid(&d, fields[3])?;
            let ball: i64 = parse_int(fields[4], "ball")?;
            let expected = parse_element(&d, fields[5])?;
            let complex = word_complex(&d, &word)?;
            let class = decat_complex(&d, &complex, &default_candidates(&d, ball))?;
            Ok(if class.element == expected {
                (true, format!("class={}", show_element(&d, &class.element)))
            } else {
                (
                    false,
                    format!(
                        "class={} expected={}",
                        show_element(&d, &class.element),
                        show_element(&d, &expected)
                    ),
                )
            })
        }
        "crosscheck" => {
            expect_fields(fields, 6)?;
            let d = record_datum(fields)?;
            let word = parse_index_word(&d, fields[3])?;
            let omega = parse_weight(&d, fields[4])?;
            let ball: i64 = parse_int(fields[5], "ball")?;
            let report = cross_check_asp(&d, &word, &omega, SgnConvention::Q, ball)?;
            Ok((report.equal, report.to_string()))
        }
        "complex-eq" => {
            expect_fields(fields, 5)?;
            let d = record_datum(fields)?;
            let report =
                verify_braid_relation(&d, &braid(&d, fields[3])?, &braid(&d, fields[4])?)?;
            Ok((report.isomorphic, braid_detail(&report)))
        }
        "rank-eq" => {
            expect_fields(fields, 5)?;
            let d = record_datum(fields)?;
            let m = build(&d, fields[3])?;
            let expected = parse_scalar(&d, fields[4])?;
            let got = m.graded_rank();
            Ok(if got == expected {
                (true, format!("rank={got}"))
            } else {
                (false, format!("rank={got} expected={expected}"))
            })
        }
        "census-eq" => {
            expect_fields(fields, 6)?;
            let d = record_datum(fields)?;
            let m = build(&d, fields[3])?;
            let ball: i64 = parse_int(fields[4], "ball")?;
            let census = standard_filtration(&d, &m, &default_candidates(&d, ball))?;
            let mut expected = Vec::new();
            for entry in fields[5].split_whitespace() {
                let (elem, deg) = entry.rsplit_once('@').ok_or_else(|| {
                    CliError::Usage(format!("census entry `{entry}` is not `element@degree`"))
                })?;
                expected.push((parse_affine(&d, elem)?, parse_int::<i64>(deg, "degree")?));
            }
            Ok(if census_key(&census) == census_key(&expected) {
                (true, format!("census={}", show_census(&census)))
            } else {
                (
                    false,
                    format!(
                        "census={} expected={}",
                        show_census(&census),
                        show_census(&expected)
                    ),
                )
            })
        }
        "bimod-iso" => {
            expect_fields(fields, 5)?;
            let d = record_datum(fields)?;
            let a = build(&d, fields[3])?;
            let b = build(&d, fields[4])?;
            let iso = bimodules_isomorphic(&d, &a, &b)?.is_some();
            Ok((iso, format!("iso={}", if iso { "yes" } else { "no" })))
        }
        "hom-zero" => {
            expect_fields(fields, 6)?;
            let d = record_datum(fields)?;
            let a = build(&d, fields[3])?;
            let b = build(&d, fields[4])?;
            let cutoff: i64 = parse_int(fields[5], "cutoff")?;
            let dims = hom_degree_zero(&d, &a, &b, cutoff)?;
            let all_zero = dims.iter().all(|&n| n == 0);
            let shown = dims
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",");
            Ok((all_zero, format!("dims={shown}")))
        }
        "uzero-eq" => {
            expect_fields(fields, 5)?;
            let d = record_datum(fields)?;
            let a = build(&d, fields[3])?.specialize_u_zero();
            let b = build(&d, fields[4])?.specialize_u_zero();
            let same = a.same_presentation(&b);
            Ok((same, format!("match={}", if same { "yes" } else { "no" })))
        }
        "order-min" => {
            expect_fields(fields, 4)?;
            let d = record_datum(fields)?;
            let ball: i64 = parse_int(fields[3], "ball")?;
            let mut minima: BTreeMap<usize, Weight> = BTreeMap::new();
            for g in translation_candidates(&d, ball) {
                let x = g.translation;
                let c = d.omega_component(&x);
                match minima.get(&c) {
                    Some(cur) if d.total_key(cur) <= d.total_key(&x) => {}
                    _ => {
                        minima.insert(c, x);
                    }
                }
            }
            let mut got: Vec<Weight> = minima.into_values().collect();
            got.sort();
            let mut expected: Vec<Weight> = d
                .omega_elements()
                .iter()
                .map(|o| o.translation.clone())
                .collect();
            expected.sort();
            let shown = got
                .iter()
                .map(|w| format!("[{w}]"))
                .collect::<Vec<_>>()
                .join(" ");
            Ok((got == expected, format!("minima={shown}")))
        }
        "lift-len" => {
            expect_fields(fields, 4)?;
            let d = record_datum(fields)?;
            let ball: i64 = parse_int(fields[3], "ball")?;
            let mut checked = 0usize;
            for g in default_candidates(&d, ball) {
                let lift = positive_lift(&d, &g)?;
                let ts = lift
                    .0
                    .iter()
                    .filter(|l| matches!(l, BraidLetter::Ts { .. }))
                    .count() as u64;
                if ts != coxeter_length(&d, &g) {
                    return Ok((
                        false,
                        format!(
                            "element={} lift_letters={} length={}",
                            show_affine(&g),
                            ts,
                            coxeter_length(&d, &g)
                        ),
                    ));
                }
                checked += 1;
            }
            Ok((true, format!("checked={checked}")))
        }
        other => Err(CliError::Usage(format!("unknown corpus mode `{other}`"))),
    }
}
