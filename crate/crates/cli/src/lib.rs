//! The `ucm` command-line driver, exposed as a library so that it can be
//! exercised in-process.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ucm_core::analysis::{self, SummaryView};
use ucm_core::export::{self, TableFormat};
use ucm_core::{compile, Compilation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MODEL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ucm",
    version,
    about = "Check, tabulate, and export use case models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report diagnostics for a model.
    Check {
        file: PathBuf,
        /// Treat warnings as failures.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t = CheckFormat::Text)]
        format: CheckFormat,
    },
    /// Print a generated summary table.
    #[command(subcommand)]
    Table(TableCommand),
    /// Serialize a model.
    Export {
        #[arg(value_enum)]
        format: ExportFormat,
        file: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum TableCommand {
    /// Exception summary, global or for one use case.
    Exceptions {
        file: PathBuf,
        #[arg(long, value_enum, conflicts_with = "usecase")]
        view: Option<ViewArg>,
        /// Restrict to exceptions that can occur within this use case.
        #[arg(long)]
        usecase: Option<String>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Handler summary.
    Handlers {
        file: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Mode switches per use case.
    Modes {
        file: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Services offered in each mode.
    Services {
        file: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
}

#[derive(Debug, Args)]
struct FormatArg {
    #[arg(long = "format", value_enum, default_value_t = TableArg::Md)]
    format: TableArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ViewArg {
    Global,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableArg {
    Md,
    Csv,
}

impl From<TableArg> for TableFormat {
    fn from(t: TableArg) -> Self {
        match t {
            TableArg::Md => TableFormat::Markdown,
            TableArg::Csv => TableFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Json,
    Xmi,
    Dot,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    let mut ctx = Context { stdout, stderr };
    match ctx.dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure(code)) => code,
    }
}

/// Early exit carrying an exit code; the message is already printed.
struct Failure(i32);

type Outcome = Result<i32, Failure>;

struct Context<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

struct Loaded {
    source: String,
    compilation: Compilation,
}

impl Context<'_> {
    fn dispatch(&mut self, command: Command) -> Outcome {
        match command {
            Command::Check {
                file,
                strict,
                format,
            } => self.check(&file, strict, format),
            Command::Table(table) => self.table(table),
            Command::Export {
                format,
                file,
                output,
            } => self.export(format, &file, output.as_deref()),
        }
    }

    fn fail(&mut self, code: i32, message: impl std::fmt::Display) -> Failure {
        let _ = writeln!(self.stderr, "error: {message}");
        Failure(code)
    }

    fn load(&mut self, file: &Path) -> Result<Loaded, Failure> {
        let source = fs::read_to_string(file)
            .map_err(|e| self.fail(EXIT_USAGE, format!("cannot read `{}`: {e}", file.display())))?;
        let compilation = compile(&source, file);
        Ok(Loaded {
            source,
            compilation,
        })
    }

    fn emit(&mut self, text: &str) -> Outcome {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|e| self.fail(EXIT_USAGE, format!("cannot write output: {e}")))?;
        Ok(EXIT_OK)
    }

    fn print_diagnostics(&mut self, loaded: &Loaded, errors_only: bool) {
        for d in &loaded.compilation.diagnostics {
            if errors_only && !d.is_error() {
                continue;
            }
            let _ = write!(self.stderr, "{}", d.render(&loaded.source));
        }
    }

    fn check(&mut self, file: &Path, strict: bool, format: CheckFormat) -> Outcome {
        let loaded = self.load(file)?;
        let c = &loaded.compilation;
        match format {
            CheckFormat::Text => {
                self.print_diagnostics(&loaded, false);
                let errors = c.diagnostics.iter().filter(|d| d.is_error()).count();
                let warnings = c.diagnostics.len() - errors;
                if !c.diagnostics.is_empty() {
                    let _ = writeln!(self.stderr, "{errors} error(s), {warnings} warning(s)");
                }
            }
            CheckFormat::Json => {
                let list: Vec<_> = c.diagnostics.iter().map(|d| d.to_json()).collect();
                let mut text = serde_json::to_string_pretty(&list).expect("json value");
                text.push('\n');
                self.emit(&text)?;
            }
        }
        let failed = c.has_errors() || (strict && c.has_warnings());
        Ok(if failed { EXIT_MODEL } else { EXIT_OK })
    }

    /// Loads a model whose references all resolve and whose invocations are
    /// acyclic; otherwise prints the errors and fails.
    fn analyzable(&mut self, file: &Path) -> Result<Loaded, Failure> {
        let loaded = self.load(file)?;
        if loaded.compilation.blocks_analysis() {
            self.print_diagnostics(&loaded, true);
            return Err(self.fail(
                EXIT_MODEL,
                format!(
                    "`{}` has errors that prevent table generation",
                    file.display()
                ),
            ));
        }
        Ok(loaded)
    }

    fn table(&mut self, command: TableCommand) -> Outcome {
        let (table, format) = match command {
            TableCommand::Exceptions {
                file,
                view: _,
                usecase,
                format,
            } => {
                let loaded = self.analyzable(&file)?;
                let m = loaded.compilation.model.as_ref().expect("model present");
                let (view, title) = match usecase {
                    Some(name) => {
                        if m.use_case(&name).is_none_or(|uc| uc.is_handler) {
                            return Err(self.fail(
                                EXIT_USAGE,
                                format!("`{name}` is not a use case in `{}`", file.display()),
                            ));
                        }
                        let title = format!("Exception summary: {name}");
                        (SummaryView::UseCase(name), title)
                    }
                    None => (SummaryView::Global, "Exception summary: global".to_string()),
                };
                let rows =
                    analysis::exception_summary(m, &view).map_err(|e| self.fail(EXIT_MODEL, e))?;
                (export::exception_table(&title, &rows), format)
            }
            TableCommand::Handlers { file, format } => {
                let loaded = self.analyzable(&file)?;
                let m = loaded.compilation.model.as_ref().expect("model present");
                let rows = analysis::handler_summary(m).map_err(|e| self.fail(EXIT_MODEL, e))?;
                (export::handler_table(&rows), format)
            }
            TableCommand::Modes { file, format } => {
                let loaded = self.analyzable(&file)?;
                let m = loaded.compilation.model.as_ref().expect("model present");
                (
                    export::mode_switch_table(&analysis::mode_switch_table(m)),
                    format,
                )
            }
            TableCommand::Services { file, format } => {
                let loaded = self.analyzable(&file)?;
                let m = loaded.compilation.model.as_ref().expect("model present");
                (
                    export::mode_service_table(&analysis::mode_service_table(m)),
                    format,
                )
            }
        };
        self.emit(&export::render_table(&table, format.format.into()))
    }

    fn export(&mut self, format: ExportFormat, file: &Path, output: Option<&Path>) -> Outcome {
        let loaded = self.load(file)?;
        let Some(m) = loaded.compilation.model.as_ref() else {
            self.print_diagnostics(&loaded, true);
            return Err(Failure(EXIT_MODEL));
        };
        let text = match format {
            ExportFormat::Json => export::export_json(m),
            ExportFormat::Xmi => export::export_xmi(m),
            ExportFormat::Dot => export::export_dot(m),
        };
        match output {
            None => self.emit(&text),
            Some(path) => {
                fs::write(path, text).map_err(|e| {
                    self.fail(
                        EXIT_USAGE,
                        format!("cannot write `{}`: {e}", path.display()),
                    )
                })?;
                Ok(EXIT_OK)
            }
        }
    }
}
