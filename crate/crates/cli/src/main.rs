//! `affhecke`: exact computations in extended affine Hecke algebras and
//! their bimodule categorification.

use affhecke::affweyl::{validate_word, BraidWord};
use affhecke::bimod::{default_candidates, standard_filtration, translation_candidates};
use affhecke::decat::{cross_check_asp, decat_bimodule, decat_complex};
use affhecke::hecke::{asp_act, AspElement, SgnConvention};
use affhecke::homotopy::{verify_braid_relation, word_complex};
use affhecke::rootdata::{Lattice, RootDatum, RootSystemType, Weight};
use affhecke_cli::corpus::{braid_detail, run_corpus, show_census};
use affhecke_cli::grammar::{
    build_bimod_word, parse_bimod_word, parse_character, parse_element, parse_index_word,
    parse_weight, show_element,
};
use affhecke_cli::CliError;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "affhecke",
    version,
    about = "Exact symbolic computation in extended affine Hecke algebras, \
             their antispherical modules, and the graded-bimodule categorification."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DatumArgs {
    /// Root system: A1, A2, B2, G2, or A1xA1.
    #[arg(long = "type", default_value = "A1", value_name = "TYPE")]
    system: String,
    /// Character lattice: weight or root.
    #[arg(long, default_value = "weight")]
    lattice: String,
}

impl DatumArgs {
    fn datum(&self) -> Result<RootDatum, CliError> {
        let system = self
            .system
            .parse::<RootSystemType>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let lattice = self
            .lattice
            .parse::<Lattice>()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(RootDatum::new(system, lattice))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Multiply Hecke elements and print the Bernstein normal form.
    HeckeMul {
        #[command(flatten)]
        datum: DatumArgs,
        /// Elements in the grammar `q^2*e[1,0]*T[s1.s2] + ...`.
        #[arg(required = true, num_args = 2..)]
        elements: Vec<String>,
    },
    /// Parse one element expression and print its normal form.
    HeckeNf {
        #[command(flatten)]
        datum: DatumArgs,
        element: String,
    },
    /// Act by a Hecke element on an antispherical vector.
    AspAct {
        #[command(flatten)]
        datum: DatumArgs,
        /// Character collapsing T_w: `minus-one` (sign) or `q` (trivial).
        #[arg(long, default_value = "minus-one")]
        sgn: String,
        /// The acting element.
        element: String,
        /// The vector, a T-free expression such as `e[1] + q*e[-1]`.
        vector: String,
    },
    /// Build a bimodule from a construction word and print its presentation.
    BimodBuild {
        #[command(flatten)]
        datum: DatumArgs,
        /// Word such as `R0.R1@om[1]`; letters R<i>, th[λ], om[μ].
        word: String,
    },
    /// Print the graded rank and standard-filtration census of a word.
    BimodChar {
        #[command(flatten)]
        datum: DatumArgs,
        word: String,
        /// Candidate radius for the filtration.
        #[arg(long, default_value_t = 4)]
        ball: i64,
    },
    /// Verify braid relations on the complex level and report witnesses.
    BraidVerify {
        #[command(flatten)]
        datum: DatumArgs,
        /// The two sides of one relation (omit with --defining).
        #[arg(num_args = 0..=2)]
        words: Vec<String>,
        /// Verify every termwise-strict defining relation instance over the
        /// ball instead (lattice sums, commutations, finite braid words,
        /// Ω-relations, inverses; the ⟨x,α̌⟩ = 1 exchange relation holds
        /// only in the algebra and is covered by corpus braid-eq records).
        #[arg(long)]
        defining: bool,
        /// Weight radius for --defining.
        #[arg(long, default_value_t = 1)]
        ball: i64,
        /// Stop after this many relations (exit 3 when truncated).
        #[arg(long)]
        budget: Option<usize>,
        /// Include wall-clock times in the report lines.
        #[arg(long)]
        timings: bool,
    },
    /// Class of a construction word in the Hecke algebra.
    Decat {
        #[command(flatten)]
        datum: DatumArgs,
        /// Construction word, or a braid word with --complex.
        word: String,
        /// Read the word as a braid word and decategorify its complex.
        #[arg(long)]
        complex: bool,
        /// Candidate radius for the filtrations.
        #[arg(long, default_value_t = 4)]
        ball: i64,
    },
    /// Compare the filtration route and the operator route on the
    /// antispherical module.
    Crosscheck {
        #[command(flatten)]
        datum: DatumArgs,
        /// Dotted affine-simple indices, e.g. `0.1.0`; `e` for the empty word.
        word: Option<String>,
        /// Translation coordinates of the Ω-twist (default: identity).
        #[arg(long)]
        omega: Option<String>,
        /// Candidate radius (default: 2·len + 2).
        #[arg(long)]
        ball: Option<i64>,
        /// Character collapsing T_w on the operator side.
        #[arg(long, default_value = "q")]
        sgn: String,
        /// Sweep every word up to this length over every Ω-component.
        #[arg(long, value_name = "LEN")]
        all_words: Option<usize>,
    },
    /// Run a line-delimited corpus of identities.
    CorpusRun {
        path: PathBuf,
        /// Worker threads; the report is identical for any value.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
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

fn braid(datum: &RootDatum, text: &str) -> Result<BraidWord, CliError> {
    let word = BraidWord::from_str(text)?;
    validate_word(datum, &word)?;
    Ok(word)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::HeckeMul { datum, elements } => {
            let d = datum.datum()?;
            let mut acc = parse_element(&d, &elements[0])?;
            for text in &elements[1..] {
                let next = parse_element(&d, text)?;
                acc = affhecke::hecke::hecke_multiply(&d, &acc, &next);
            }
            println!("{}", show_element(&d, &acc));
            Ok(0)
        }
        Command::HeckeNf { datum, element } => {
            let d = datum.datum()?;
            let e = parse_element(&d, &element)?;
            println!("{}", show_element(&d, &e));
            Ok(0)
        }
        Command::AspAct {
            datum,
            sgn,
            element,
            vector,
        } => {
            let d = datum.datum()?;
            let conv = parse_sgn(&sgn)?;
            let h = parse_element(&d, &element)?;
            let m = AspElement(parse_character(&d, &vector)?);
            println!("{}", asp_act(&d, &h, &m, conv));
            Ok(0)
        }
        Command::BimodBuild { datum, word } => {
            let d = datum.datum()?;
            let w = parse_bimod_word(&d, &word)?;
            let m = build_bimod_word(&d, &w)?;
            let degrees = m
                .degrees
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",");
            println!(
                "label={w} rank={} degrees={degrees} graded_rank={}",
                m.rank,
                m.graded_rank()
            );
            for (gen, mat) in m.gens.iter().zip(&m.mats) {
                let rows: Vec<String> = (0..mat.rows)
                    .map(|r| {
                        (0..mat.cols)
                            .map(|c| mat.at(r, c).to_string())
                            .collect::<Vec<_>>()
                            .join(", ")
                    })
                    .collect();
                println!("right {gen} = [{}]", rows.join("; "));
            }
            Ok(0)
        }
        Command::BimodChar { datum, word, ball } => {
            let d = datum.datum()?;
            let w = parse_bimod_word(&d, &word)?;
            let m = build_bimod_word(&d, &w)?;
            let census = standard_filtration(&d, &m, &default_candidates(&d, ball))?;
            println!(
                "label={w} rank={} graded_rank={} census={}",
                m.rank,
                m.graded_rank(),
                show_census(&census)
            );
            Ok(0)
        }
        Command::BraidVerify {
            datum,
            words,
            defining,
            ball,
            budget,
            timings,
        } => {
            let d = datum.datum()?;
            let pairs: Vec<(BraidWord, BraidWord)> = if defining {
                let weights: Vec<Weight> = translation_candidates(&d, ball)
                    .into_iter()
                    .map(|g| g.translation)
                    .collect();
                affhecke::homotopy::strict_relation_pairs(&d, &weights)?
            } else {
                if words.len() != 2 {
                    return Err(CliError::Usage(
                        "braid-verify takes two braid words (or --defining)".into(),
                    ));
                }
                vec![(braid(&d, &words[0])?, braid(&d, &words[1])?)]
            };
            let truncated = budget.is_some_and(|b| pairs.len() > b);
            let take = budget.unwrap_or(pairs.len()).min(pairs.len());
            let mut failures = 0usize;
            for (lhs, rhs) in &pairs[..take] {
                let report = verify_braid_relation(&d, lhs, rhs)?;
                if timings {
                    println!("{report}");
                } else {
                    println!(
                        "{} witness={}",
                        braid_detail(&report),
                        report
                            .witness_hash
                            .map(|h| format!("{h:016x}"))
                            .unwrap_or_else(|| "-".into())
                    );
                }
                if !report.isomorphic {
                    failures += 1;
                }
            }
            if failures > 0 {
                return Ok(1);
            }
            if truncated {
                eprintln!("note: stopped after {take} of {} relations", pairs.len());
                return Ok(3);
            }
            Ok(0)
        }
        Command::Decat {
            datum,
            word,
            complex,
            ball,
        } => {
            let d = datum.datum()?;
            let candidates = default_candidates(&d, ball);
            let class = if complex {
                let w = braid(&d, &word)?;
                decat_complex(&d, &word_complex(&d, &w)?, &candidates)?
            } else {
                let w = parse_bimod_word(&d, &word)?;
                decat_bimodule(&d, &build_bimod_word(&d, &w)?, &candidates)?
            };
            println!(
                "decat object={} class={}",
                class.object,
                show_element(&d, &class.element)
            );
            Ok(0)
        }
        Command::Crosscheck {
            datum,
            word,
            omega,
            ball,
            sgn,
            all_words,
        } => {
            let d = datum.datum()?;
            let conv = parse_sgn(&sgn)?;
            let mut mismatches = 0usize;
            let mut total = 0usize;
            let mut check = |idxs: &[usize], mu: &Weight| -> Result<(), CliError> {
                let radius = ball.unwrap_or(2 * idxs.len() as i64 + 2);
                let report = cross_check_asp(&d, idxs, mu, conv, radius)?;
                println!("{report}");
                total += 1;
                if !report.equal {
                    mismatches += 1;
                }
                Ok(())
            };
            if let Some(maxlen) = all_words {
                let indices = d.affine_index_set();
                let omegas: Vec<Weight> = d
                    .omega_elements()
                    .iter()
                    .map(|o| o.translation.clone())
                    .collect();
                let mut words: Vec<Vec<usize>> = vec![Vec::new()];
                for len in 0..=maxlen {
                    if len > 0 {
                        words = words
                            .iter()
                            .flat_map(|w| {
                                indices.iter().map(move |&i| {
                                    let mut next = w.clone();
                                    next.push(i);
                                    next
                                })
                            })
                            .collect();
                    }
                    for w in &words {
                        for mu in &omegas {
                            check(w, mu)?;
                        }
                    }
                }
                println!("crosscheck total={total} mismatches={mismatches}");
            } else {
                let idxs = parse_index_word(&d, word.as_deref().unwrap_or("e"))?;
                let mu = match &omega {
                    Some(text) => parse_weight(&d, text)?,
                    None => Weight::zero(d.rank()),
                };
                check(&idxs, &mu)?;
            }
            Ok(if mismatches > 0 { 1 } else { 0 })
        }
        Command::CorpusRun { path, jobs } => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let outcome = run_corpus(&text, jobs)?;
            for record in &outcome.records {
                println!("{}", record.report_line());
            }
            println!(
                "corpus total={} passed={} failed={}",
                outcome.records.len(),
                outcome.passed,
                outcome.failed
            );
            Ok(if outcome.failed > 0 { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
