use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use geocount::catalog::{self, SpaceSpec};
use geocount::exact::{parse_rational, parse_vector, parse_vector_list};
use geocount::geodesics::FocalOrbitDescriptor;
use geocount::lattice::{central_lattice, validate_unit_lattice, CentralLattice};
use geocount::weyl::DEFAULT_MAX_ORDER;
use geocount::{diagram, Error, Rational, RationalVector, SymmetricSpace};

#[derive(Parser, Debug)]
#[command(name = "geocount", version, about = "Exact geodesic counts on compact symmetric spaces")]
struct Cli {
    #[command(flatten)]
    space: SpaceArgs,

    /// Largest Weyl group to enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Coordinate display for text output: π-units, or floats multiplied by π.
    #[arg(long, global = true, value_enum, default_value_t = Units::Pi)]
    units: Units,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SpaceArgs {
    /// Named space: S2, RP2, Gr2R4, Gr2R4+, T<n>, SU2-group, Gr2Rn:<n>.
    #[arg(long, global = true, conflicts_with = "space")]
    preset: Option<String>,

    /// Space-spec JSON file.
    #[arg(long, global = true, value_name = "FILE")]
    space: Option<PathBuf>,

    /// Replace the unit lattice, e.g. "[[1,0],[0,1]]" (π-units).
    #[arg(long, global = true, value_parser = parse_list_arg)]
    lattice: Option<Generators>,
}

/// Lattice generators given as one argument.
#[derive(Clone, Debug)]
struct Generators(Vec<RationalVector>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Units {
    Pi,
    AbsoluteApprox,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root datum, lattices, Weyl group order and validation report.
    Describe,
    /// Fundamental group Γ/Γ_0.
    Pi1,
    /// Focal orbits of exp_p^{-1}(exp_p(H)) up to a norm bound.
    Geodesics {
        #[arg(long, value_parser = parse_vector_arg)]
        target: RationalVector,
        /// Bound on |H|² (π-units); defaults to the minimal norm.
        #[arg(long = "max-norm2", value_parser = parse_rational_arg)]
        max_norm2: Option<Rational>,
    },
    /// Focal orbits of the shortest geodesics to exp_p(H).
    Minimal {
        #[arg(long, value_parser = parse_vector_arg)]
        target: RationalVector,
    },
    /// Regularity, cut and conjugate status and index of H.
    Classify {
        #[arg(long, value_parser = parse_vector_arg)]
        point: RationalVector,
    },
    /// Lattice translates of H with the same norm.
    Equivalents {
        #[arg(long, value_parser = parse_vector_arg)]
        point: RationalVector,
    },
    /// SVG Stiefel diagram of a rank-2 space.
    Diagram {
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Half-width w of the window [-w, w]².
        #[arg(long, value_parser = parse_rational_arg, default_value = "2")]
        window: Rational,
        #[arg(long = "mark", value_parser = parse_vector_arg)]
        marks: Vec<RationalVector>,
    },
}

fn parse_vector_arg(text: &str) -> Result<RationalVector, String> {
    parse_vector(text).map_err(|e| e.to_string())
}

fn parse_list_arg(text: &str) -> Result<Generators, String> {
    parse_vector_list(text).map(Generators).map_err(|e| e.to_string())
}

fn parse_rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::NotFound(_) => 2,
        Error::InvalidInput(_)
        | Error::InvalidRootSystem(_)
        | Error::InvalidLattice(_)
        | Error::Schema(_)
        | Error::Io(_) => 3,
        Error::NotSupported(_) => 4,
        Error::GroupTooLarge { .. } => 5,
        Error::InternalInvariantViolation(_) => 1,
    }
}

fn load(args: &SpaceArgs) -> geocount::Result<SpaceSpec> {
    let spec = match (&args.preset, &args.space) {
        (Some(name), _) => catalog::preset(name)?,
        (None, Some(path)) => catalog::from_file(path)?,
        (None, None) => unreachable!("checked after parsing"),
    };
    match &args.lattice {
        Some(Generators(generators)) => spec.with_lattice(generators),
        None => Ok(spec),
    }
}

struct Printer {
    format: Format,
    units: Units,
}

impl Printer {
    fn vector(&self, v: &RationalVector) -> String {
        match self.units {
            Units::Pi => v.to_string(),
            Units::AbsoluteApprox => {
                let parts: Vec<String> =
                    v.to_f64().iter().map(|x| format!("{:.6}", x * std::f64::consts::PI)).collect();
                format!("[{}]", parts.join(", "))
            }
        }
    }

    fn norm(&self, n: &Rational) -> String {
        match self.units {
            Units::Pi => n.to_string(),
            Units::AbsoluteApprox => {
                let x = rational_to_f64(n);
                format!("{:.6}", x * std::f64::consts::PI * std::f64::consts::PI)
            }
        }
    }

    fn orbits(&self, orbits: &[FocalOrbitDescriptor]) -> String {
        match self.format {
            Format::Json => serde_json::to_string(orbits).expect("orbits serialize"),
            Format::Text => {
                let mut out = Vec::new();
                for o in orbits {
                    let points: Vec<String> = o.torus_intersection.iter().map(|p| self.vector(p)).collect();
                    out.push(format!(
                        "orbit {}  |H|^2 = {}  dim = {}  components = {}  label = [{}]\n  torus points: {}",
                        self.vector(&o.representative),
                        self.norm(&o.norm_squared),
                        o.dimension,
                        o.component_count,
                        o.homotopy_label.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
                        points.join(" ")
                    ));
                }
                out.join("\n")
            }
        }
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    RationalVector::new(vec![r.clone()]).to_f64()[0]
}

fn describe(space: &SymmetricSpace) -> geocount::Result<Value> {
    let spec = space.spec();
    let datum = space.datum();
    let roots: Vec<Value> = datum
        .positive_indices()
        .map(|i| {
            json!({
                "covector": datum.root(i).covector,
                "multiplicity": datum.root(i).multiplicity,
                "simple": datum.simple_indices().contains(&i),
            })
        })
        .collect();
    let central = match central_lattice(datum) {
        CentralLattice::Lattice(l) => json!({ "discrete": true, "generators": l.generators() }),
        CentralLattice::NotDiscrete { semisimple_slice } => {
            json!({ "discrete": false, "semisimple_slice": semisimple_slice.generators() })
        }
    };
    let report = validate_unit_lattice(datum, space.gamma());
    Ok(json!({
        "name": spec.name,
        "notes": spec.notes,
        "rank": datum.rank(),
        "gram": datum.gram().to_rows().into_iter().map(RationalVector::new).collect::<Vec<_>>(),
        "positive_roots": roots,
        "unit_lattice": space.gamma().generators(),
        "fundamental_lattice": space.gamma0().generators(),
        "central_lattice": central,
        "weyl_order": space.weyl().order(),
        "validation": { "valid": report.is_valid(), "failures": report.failures },
        "fundamental_group": pi1_json(space),
        "simply_connected": space.simply_connected_report()?,
    }))
}

fn pi1_json(space: &SymmetricSpace) -> Value {
    let pi1 = space.fundamental_group();
    let factors: Vec<Value> = pi1
        .invariant_factors
        .iter()
        .map(|d| d.to_string().parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::from(d.to_string())))
        .collect();
    json!({ "invariant_factors": factors, "free_rank": pi1.free_rank })
}

fn run(cli: &Cli) -> geocount::Result<String> {
    let spec = load(&cli.space)?;
    let printer = Printer { format: cli.format, units: cli.units };

    if let Command::Diagram { out, window, marks } = &cli.command {
        let svg = diagram::emit_svg(&spec, window, marks)?;
        return match out {
            Some(path) => {
                std::fs::write(path, svg)?;
                Ok(String::new())
            }
            None => Ok(svg),
        };
    }

    let space = SymmetricSpace::new(spec, cli.max_order)?;
    let text = match &cli.command {
        Command::Describe => {
            let value = describe(&space)?;
            match cli.format {
                Format::Json => value.to_string(),
                Format::Text => serde_json::to_string_pretty(&value).expect("describe serializes"),
            }
        }
        Command::Pi1 => match cli.format {
            Format::Json => {
                // Keep the field order stable: factors first, then the free rank.
                let pi1 = space.fundamental_group();
                let factors: Vec<String> = pi1.invariant_factors.iter().map(ToString::to_string).collect();
                format!("{{\"invariant_factors\":[{}],\"free_rank\":{}}}", factors.join(","), pi1.free_rank)
            }
            Format::Text => space.fundamental_group().to_string(),
        },
        Command::Geodesics { target, max_norm2 } => {
            let bound = match max_norm2 {
                Some(b) => b.clone(),
                None => geocount::lattice::closest_vectors(space.gamma(), target)?.0,
            };
            printer.orbits(&space.enumerate_preimages(target, &bound)?)
        }
        Command::Minimal { target } => printer.orbits(&space.minimal_geodesics(target)?),
        Command::Classify { point } => {
            let c = space.classify_point(point)?;
            match cli.format {
                Format::Json => serde_json::to_string(&c).expect("classification serializes"),
                Format::Text => {
                    format!("{:?} {:?} {:?} index={}", c.regularity, c.cut, c.conjugate, c.index)
                }
            }
        }
        Command::Equivalents { point } => {
            let points = space.focal_equivalents(point)?;
            match cli.format {
                Format::Json => serde_json::to_string(&points).expect("points serialize"),
                Format::Text => points.iter().map(|p| printer.vector(p)).collect::<Vec<_>>().join("\n"),
            }
        }
        Command::Diagram { .. } => unreachable!("handled above"),
    };
    Ok(text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.space.preset.is_none() && cli.space.space.is_none() {
        Cli::command().error(ErrorKind::MissingRequiredArgument, "one of --preset or --space is required").exit();
    }
    match run(&cli) {
        Ok(text) => {
            if !text.is_empty() {
                if text.ends_with('\n') {
                    print!("{text}");
                } else {
                    println!("{text}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
