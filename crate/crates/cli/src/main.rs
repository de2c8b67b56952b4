use std::process::ExitCode;

use cheshire_cli::{parse_config, run_preset};

fn main() -> ExitCode {
    let config = match parse_config(std::env::args_os()) {
        Ok(c) => c,
        Err(cheshire_cli::UsageError::Clap(e)) if e.exit_code() == 0 => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };

    match run_preset(&config) {
        Ok(out) => {
            for p in &out.summary.estimated.points {
                let axes: Vec<String> = p
                    .axes
                    .iter()
                    .map(|a| match a.mean_over_g {
                        Some(r) => format!(
                            "{} mean/g = {r:.4} ± {:.4}",
                            a.axis,
                            a.std_err_over_g.unwrap_or(0.0)
                        ),
                        None => format!("{} mean = {:.4e}", a.axis, a.mean),
                    })
                    .collect();
                println!(
                    "[{}] post_rate = {:.5} ({} of {}); {}",
                    config.preset,
                    p.post_rate,
                    p.d1_count,
                    p.n_shots,
                    axes.join(", ")
                );
            }
            println!(
                "wrote {} and {}",
                out.shots_path.display(),
                out.summary_path.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
