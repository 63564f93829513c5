use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, ValueEnum};
use ringlab_core::verify::{run_all, CheckOutcome, Fault, VerifyOptions};

use crate::EXIT_VERIFY_FAILED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InjectedFault {
    InverseSign,
    ClosureForcing,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    /// Deliberately break one identity to confirm the checks can fail.
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<InjectedFault>,
}

pub fn format_table(outcomes: &[CheckOutcome]) -> String {
    let mut out = format!("{:<24} {:>6} {:>14} {:>14}  {}\n", "check", "cases", "value", "tolerance", "status");
    for o in outcomes {
        let bound = format!("{} {:.1e}", if o.at_least { ">=" } else { "<=" }, o.tolerance);
        out.push_str(&format!(
            "{:<24} {:>6} {:>14.3e} {:>14}  {}\n",
            o.name,
            o.cases,
            o.value,
            bound,
            if o.passed { "PASS" } else { "FAIL" }
        ));
    }
    out
}

pub fn run(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let opts = VerifyOptions {
        seed: args.seed,
        fault: args.inject_fault.map(|f| match f {
            InjectedFault::InverseSign => Fault::InverseSign,
            InjectedFault::ClosureForcing => Fault::ClosureForcing,
        }),
    };
    let clock = Instant::now();
    let outcomes = run_all(&opts);
    print!("{}", format_table(&outcomes));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} checks passed in {:.2} s", outcomes.len() - failed, outcomes.len(), clock.elapsed().as_secs_f64());
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    })
}
