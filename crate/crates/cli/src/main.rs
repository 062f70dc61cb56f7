use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use banglambek::calculus::{check_derivation, Derivation, DerivationNode, RuleSet, System};
use banglambek::encoding::{deduction_search, embed, encode_grammar, gamma, Deduction};
use banglambek::formula::Sequent;
use banglambek::grammar::BinaryGrammar;
use banglambek::lingparse::{builtin_lexicon, parse_sentence, parses, Lexicon};
use banglambek::prover::{
    brute_force_derivable, decide_restricted, prove, size_bound, Budget, ProveResult,
};
use banglambek::syntax::{parse_formula, parse_sequent};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

/// `println!` that ignores a closed standard output.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const POSITIVE: u8 = 0;
const NEGATIVE: u8 = 1;
const UNKNOWN: u8 = 2;
const FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "banglambek",
    version,
    about = "Lambek calculus with a relevant modality"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `lstar`, `banglstar` or `lstar+R:<ruleset file>`
    #[arg(long, default_value = "banglstar")]
    system: String,
    /// Search-node cap
    #[arg(long)]
    budget: Option<usize>,
    /// Print the derivation
    #[arg(long)]
    tree: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Budgeted proof search
    Prove {
        sequent: String,
        #[command(flatten)]
        common: Common,
    },
    /// Decide a `!L*` sequent with `!` on variables only
    Decide {
        sequent: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check a derivation file (JSON)
    Check {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Parse a sentence with a lexicon
    Parse {
        #[arg(required = true)]
        words: Vec<String>,
        /// Lexicon file; the builtin lexicon if absent
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value = "s")]
        target: String,
        #[command(flatten)]
        common: Common,
    },
    /// Encode a binary grammar as a ruleset
    Encode {
        grammar: PathBuf,
        /// Write the ruleset here instead of standard output
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Prefix a sequent with every rule formula, banged
    Embed {
        sequent: String,
        #[command(flatten)]
        common: Common,
    },
    /// Search for banged rule formulas that derive a sequent in `!L*`
    Deduce {
        sequent: String,
        #[command(flatten)]
        common: Common,
    },
    /// Forward enumeration of derivable sequents up to a size bound
    Oracle {
        sequent: String,
        /// Size bound; 12n² + 3n for a sequent of size n if absent
        #[arg(long)]
        bound: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

type Outcome = Result<u8, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { FAILURE } else { POSITIVE });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(FAILURE)
        }
    }
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Prove { sequent, common } => cmd_prove(&sequent, &common),
        Command::Decide { sequent, common } => cmd_decide(&sequent, &common),
        Command::Check { file, common } => cmd_check(&file, &common),
        Command::Parse {
            words,
            lexicon,
            target,
            common,
        } => cmd_parse(&words, lexicon.as_ref(), &target, &common),
        Command::Encode { grammar, out, json } => cmd_encode(&grammar, out.as_ref(), json),
        Command::Embed { sequent, common } => cmd_embed(&sequent, &common),
        Command::Deduce { sequent, common } => cmd_deduce(&sequent, &common),
        Command::Oracle {
            sequent,
            bound,
            common,
        } => cmd_oracle(&sequent, bound, &common),
    }
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn system(spec: &str) -> Result<System, String> {
    match spec {
        "lstar" => Ok(System::lstar()),
        "banglstar" => Ok(System::bang_lstar()),
        _ => {
            let file = spec
                .strip_prefix("lstar+R:")
                .ok_or_else(|| format!("unknown system `{spec}`"))?;
            let rules =
                RuleSet::parse(&read(&PathBuf::from(file))?).map_err(|e| format!("{file}: {e}"))?;
            Ok(System::with_rules(rules))
        }
    }
}

fn sequent(text: &str) -> Result<Sequent, String> {
    parse_sequent(text).map_err(|e| e.to_string())
}

fn exit_code(r: &ProveResult) -> u8 {
    match r {
        ProveResult::Derivable(_) => POSITIVE,
        ProveResult::NotDerivable => NEGATIVE,
        ProveResult::Unknown(_) => UNKNOWN,
    }
}

fn result_json(goal: &Sequent, r: &ProveResult, tree: bool) -> Value {
    let mut v = json!({ "sequent": goal.to_string(), "verdict": r.verdict() });
    if let ProveResult::Unknown(why) = r {
        v["reason"] = json!(why);
    }
    if let (true, Some(d)) = (tree, r.derivation()) {
        v["derivation"] = json!(DerivationNode::from_derivation(d));
    }
    v
}

fn report(goal: &Sequent, r: &ProveResult, common: &Common) -> Outcome {
    if common.json {
        out!("{}", result_json(goal, r, common.tree));
    } else {
        match r {
            ProveResult::Unknown(why) => out!("UNKNOWN ({why})"),
            _ => out!("{}", r.verdict()),
        }
        if let (true, Some(d)) = (common.tree, r.derivation()) {
            out!("{}", d.to_json());
        }
    }
    Ok(exit_code(r))
}

fn cmd_prove(text: &str, common: &Common) -> Outcome {
    let goal = sequent(text)?;
    let sys = system(&common.system)?;
    let restricted = sys.rules().is_empty() && goal.formulas().all(|f| f.bang_on_vars_only());
    let r = match common.budget {
        Some(n) => prove(&goal, &sys, &Budget::default().with_max_nodes(n)),
        None if restricted && sys.has_bang() => {
            decide_restricted(&goal).map_err(|e| e.to_string())?
        }
        None if restricted => prove(&goal, &sys, &Budget::restricted(goal.size())),
        None => prove(&goal, &sys, &Budget::default()),
    };
    report(&goal, &r, common)
}

fn cmd_decide(text: &str, common: &Common) -> Outcome {
    let goal = sequent(text)?;
    let r = decide_restricted(&goal).map_err(|e| e.to_string())?;
    report(&goal, &r, common)
}

fn cmd_check(file: &PathBuf, common: &Common) -> Outcome {
    let sys = system(&common.system)?;
    let d = Derivation::from_json(&read(file)?).map_err(|e| e.to_string())?;
    let verdict = check_derivation(&d, &sys);
    if common.json {
        let mut v = json!({
            "conclusion": d.conclusion.to_string(),
            "valid": verdict.is_ok(),
        });
        if let Err(e) = &verdict {
            v["error"] = json!(e.to_string());
        }
        out!("{v}");
    } else {
        match &verdict {
            Ok(()) => out!("VALID {}", d.conclusion),
            Err(e) => out!("INVALID {e}"),
        }
    }
    Ok(if verdict.is_ok() { POSITIVE } else { NEGATIVE })
}

fn cmd_parse(
    words: &[String],
    lexicon: Option<&PathBuf>,
    target: &str,
    common: &Common,
) -> Outcome {
    let lex = match lexicon {
        Some(path) => {
            Lexicon::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => builtin_lexicon(),
    };
    let target = parse_formula(target).map_err(|e| e.to_string())?;
    let budget = Budget::default().with_max_nodes(common.budget.unwrap_or(1_000_000));
    let outcomes = parse_sentence(words, &lex, &target, &budget).map_err(|e| e.to_string())?;
    if common.json {
        let all: Vec<Value> = outcomes
            .iter()
            .map(|o| result_json(&o.sequent, &o.result, common.tree))
            .collect();
        out!(
            "{}",
            json!({ "parses": parses(&outcomes), "outcomes": all })
        );
    } else {
        for o in &outcomes {
            out!("{o}");
            if let (true, Some(d)) = (common.tree, o.result.derivation()) {
                out!("{}", d.to_json());
            }
        }
    }
    Ok(if parses(&outcomes) {
        POSITIVE
    } else if outcomes
        .iter()
        .any(|o| matches!(o.result, ProveResult::Unknown(_)))
    {
        UNKNOWN
    } else {
        NEGATIVE
    })
}

fn cmd_encode(file: &PathBuf, out: Option<&PathBuf>, json: bool) -> Outcome {
    let g = BinaryGrammar::parse(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?;
    let enc = encode_grammar(&g);
    let text = if json {
        enc.pair_table_json() + "\n"
    } else {
        enc.ruleset.to_text()
    };
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => out!("{}", text.trim_end()),
    }
    Ok(POSITIVE)
}

fn rules_of(common: &Common) -> Result<RuleSet, String> {
    let sys = system(&common.system)?;
    if sys.has_bang() {
        return Err("a system `lstar+R:<file>` is required".into());
    }
    Ok(sys.rules().clone())
}

fn cmd_embed(text: &str, common: &Common) -> Outcome {
    let goal = sequent(text)?;
    let e = embed(&gamma(&rules_of(common)?), &goal);
    if common.json {
        out!("{}", json!({ "sequent": e.to_string() }));
    } else {
        out!("{e}");
    }
    Ok(POSITIVE)
}

fn cmd_deduce(text: &str, common: &Common) -> Outcome {
    let goal = sequent(text)?;
    let rules = rules_of(common)?;
    let budget = Budget::default().with_max_nodes(common.budget.unwrap_or(1_000_000));
    let r = deduction_search(&goal, &rules, &budget).map_err(|e| e.to_string())?;
    let (verdict, code) = match &r {
        Deduction::Found { .. } => ("FOUND", POSITIVE),
        Deduction::NotFound => ("NOT_FOUND", NEGATIVE),
        Deduction::Unknown(_) => ("UNKNOWN", UNKNOWN),
    };
    if common.json {
        let mut v = json!({ "sequent": goal.to_string(), "verdict": verdict });
        match &r {
            Deduction::Found { subset, derivation } => {
                let b: Vec<String> = subset.iter().map(ToString::to_string).collect();
                v["subset"] = json!(b);
                if common.tree {
                    v["derivation"] = json!(DerivationNode::from_derivation(derivation));
                }
            }
            Deduction::Unknown(why) => v["reason"] = json!(why),
            Deduction::NotFound => {}
        }
        out!("{v}");
    } else {
        match &r {
            Deduction::Found { subset, derivation } => {
                out!("FOUND {}", embed(subset, &goal));
                if common.tree {
                    out!("{}", derivation.to_json());
                }
            }
            Deduction::Unknown(why) => out!("UNKNOWN ({why})"),
            Deduction::NotFound => out!("NOT_FOUND"),
        }
    }
    Ok(code)
}

fn cmd_oracle(text: &str, bound: Option<usize>, common: &Common) -> Outcome {
    let goal = sequent(text)?;
    let sys = system(&common.system)?;
    let bound = bound.unwrap_or_else(|| size_bound(goal.size()));
    let found = brute_force_derivable(&goal, &sys, bound);
    let verdict = if found { "DERIVABLE" } else { "NOT_DERIVABLE" };
    if common.json {
        out!(
            "{}",
            json!({ "sequent": goal.to_string(), "verdict": verdict, "bound": bound })
        );
    } else {
        out!("{verdict} (size bound {bound})");
    }
    Ok(if found { POSITIVE } else { NEGATIVE })
}
