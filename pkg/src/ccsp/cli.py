import contextlib
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

import typer
import yaml
from wasabi import msg

from .config import (
    ConfigValidationError,
    GeneratorConfig,
    RunConfig,
    get_settings,
    load_config,
)
from .generate import canonical_a3, gen_algebra, gen_problem
from .harness import compare_with_oracle, run_bench, run_law_suite
from .model import InvalidArgument, InvariantViolation, SolveResult, validate_instance
from .oracle import BudgetExceeded, brute_force_solve
from .polymorphism import SynthesisError, classify_language
from .report import console, frame_table, print_law_counts, print_trace, print_verdict
from .solver import SolveTrace, classify_and_solve, solve
from .storage import (
    algebra_to_model,
    instance_to_model,
    load_language,
    load_problem,
    result_to_model,
    variable_name,
)

app = typer.Typer(add_completion=False)

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_INVALID = 2
EXIT_NP_COMPLETE = 3
EXIT_INTERNAL = 4


class GenKind(str, Enum):
    Algebra = "algebra"
    Instance = "instance"


@contextlib.contextmanager
def exit_codes() -> Iterator[None]:
    try:
        yield
    except BudgetExceeded as e:
        msg.fail("Oracle refused", str(e))
        raise typer.Exit(EXIT_INVALID)
    except ConfigValidationError as e:
        msg.fail("Invalid input file")
        typer.echo(str(e))
        raise typer.Exit(EXIT_INVALID)
    except (SynthesisError, InvariantViolation) as e:
        msg.fail("Internal invariant failed", str(e))
        raise typer.Exit(EXIT_INTERNAL)
    except NotImplementedError as e:
        msg.fail("Disabled by configuration", str(e))
        raise typer.Exit(EXIT_INVALID)
    except (InvalidArgument, ValueError, OSError, yaml.YAMLError) as e:
        msg.fail("Invalid input", str(e))
        raise typer.Exit(EXIT_INVALID)


def _run_config(config_file: Optional[typer.FileText]) -> RunConfig:
    return load_config(config_file) if config_file is not None else RunConfig()


def _generator(
    config: RunConfig,
    seed: Optional[int],
    domain_size: Optional[int] = None,
    variables: Optional[int] = None,
    constraints: Optional[int] = None,
    max_arity: Optional[int] = None,
    samples: Optional[int] = None,
    planted: Optional[float] = None,
) -> GeneratorConfig:
    given = {
        "seed": seed,
        "domain_size": domain_size,
        "variable_count": variables,
        "constraint_count": constraints,
        "max_arity": max_arity,
        "samples": samples,
        "planted": planted,
    }
    values = config.generator.dict()
    values.update({k: v for k, v in given.items() if v is not None})
    return GeneratorConfig(**values)


def _finish(result: Optional[SolveResult]) -> None:
    if result is None:
        raise typer.Exit(EXIT_NP_COMPLETE)
    raise typer.Exit(EXIT_SAT if result.satisfiable else EXIT_UNSAT)


def _print_result(result: SolveResult) -> None:
    if not result.satisfiable:
        msg.fail("UNSAT")
        return
    msg.good("SAT")
    for v, x in (result.assignment or {}).items():
        typer.echo(f"{variable_name(v)} = {x}")


@app.command()
def classify(
    language_file: Path,
    as_json: bool = typer.Option(False, "--json", help="Print the verdict as JSON"),
) -> None:
    """Decide whether a constraint language is tractable."""
    with exit_codes():
        verdict = classify_language(load_language(language_file))
        if as_json:
            out: Dict[str, Any] = {"status": verdict.status}
            if verdict.tractable:
                assert verdict.algebra is not None and verdict.graph is not None
                model = algebra_to_model(verdict.algebra, verdict.graph)
                out["algebra"] = json.loads(model.json(exclude_none=True))
            else:
                out["witness_pair"] = list(verdict.witness or ())
            typer.echo(json.dumps(out, indent=2))
        else:
            print_verdict(verdict)
    raise typer.Exit(EXIT_SAT if verdict.tractable else EXIT_NP_COMPLETE)


@app.command("solve")
def solve_cmd(
    instance_file: Path,
    algebra_file: Optional[Path] = typer.Option(
        None, "--algebra", help="Algebra replacing the one in the instance"
    ),
    as_json: bool = typer.Option(False, "--json", help="Print the result file format"),
    force_oracle: bool = typer.Option(
        False, "--force-oracle", help="Solve NP-complete instances exhaustively"
    ),
    output: Optional[Path] = typer.Option(
        None, "--output", "-o", help="Write the result file here"
    ),
    config_file: Optional[typer.FileText] = typer.Option(
        None,
        "--config",
        help=(
            "YAML run config. With solver.search_fallback false, instances mixing majority"
            " and affine edges that greedy fixing cannot settle exit 2 instead of searching"
        ),
    ),
) -> None:
    """Solve an instance; exit 0 when satisfiable, 1 when not, 3 when refused as NP-complete.

    Invalid input and a search the config disables exit 2.
    """
    with exit_codes():
        config = _run_config(config_file)
        problem = load_problem(instance_file, algebra_file)
        witness = None
        trace = SolveTrace()
        if problem.language is not None:
            outcome = classify_and_solve(
                problem.language,
                problem.instance,
                config.solver,
                force_oracle=force_oracle,
                budget=get_settings().budget,
            )
            result, trace, witness = outcome.result, outcome.trace, outcome.verdict.witness
        else:
            assert problem.graph is not None
            problems = validate_instance(problem.instance)
            if problems:
                for p in problems:
                    msg.fail(str(p))
                raise InvalidArgument(f"instance has {len(problems)} problems")
            result = solve(problem.instance, problem.graph, config.solver, trace)

        model = result_to_model(result, witness, trace.to_dict())
        if output is not None:
            output.write_text(model.json(indent=2, exclude_none=True))
        if as_json:
            typer.echo(model.json(indent=2, exclude_none=True))
        elif result is None:
            msg.fail(f"NP-complete: pair {witness} has no tractable label")
        else:
            _print_result(result)
            print_trace(trace)
    _finish(result)


@app.command()
def oracle(
    instance_file: Path,
    algebra_file: Optional[Path] = typer.Option(None, "--algebra"),
    as_json: bool = typer.Option(False, "--json"),
) -> None:
    """Solve an instance by exhaustive enumeration (capped by CCSP_BUDGET)."""
    with exit_codes():
        problem = load_problem(instance_file, algebra_file)
        result = brute_force_solve(problem.instance, get_settings().budget)
        if as_json:
            typer.echo(result_to_model(result).json(indent=2, exclude_none=True))
        else:
            _print_result(result)
    _finish(result)


@app.command()
def compare(
    count: int = typer.Option(50, "--count", "-n", help="Number of generated instances"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    domain_size: Optional[int] = typer.Option(None, "--domain-size"),
    variables: Optional[int] = typer.Option(None, "--variables"),
    constraints: Optional[int] = typer.Option(None, "--constraints"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j"),
    config_file: Optional[typer.FileText] = typer.Option(None, "--config"),
) -> None:
    """Solve generated instances and check every verdict against the oracle."""
    with exit_codes():
        config = _run_config(config_file)
        cfg = _generator(config, seed, domain_size, variables, constraints)
        settings = get_settings()
        jobs = jobs if jobs is not None else settings.jobs
        df = compare_with_oracle(
            cfg,
            count,
            solver_config=config.solver,
            budget=settings.budget,
            jobs=jobs,
            progress=True,
        )
        if count and not (df.agree.all() and df.verified.all()):
            bad = df[~(df.agree & df.verified)]
            console.print(frame_table(bad[["seed", "solver", "oracle", "verified"]], "Mismatches"))
            raise typer.Exit(EXIT_INTERNAL)
        msg.good(f"{count} instances agree with the oracle")


@app.command()
def laws(
    seed: Optional[int] = typer.Option(None, "--seed"),
    samples: Optional[int] = typer.Option(None, "--samples"),
    random_algebras: bool = typer.Option(
        False,
        "--random-algebras",
        help="Draw an algebra per sample instead of using the 3-element one",
    ),
    config_file: Optional[typer.FileText] = typer.Option(None, "--config"),
) -> None:
    """Check the structural laws on random closed relations; exit 4 on any failure."""
    with exit_codes():
        cfg = _generator(_run_config(config_file), seed, samples=samples)
        if random_algebras:
            report = run_law_suite(cfg, progress=True)
        else:
            algebra, graph = canonical_a3()
            report = run_law_suite(cfg, algebra, graph, progress=True)
        print_law_counts(report.counts())
        if not report.ok:
            console.print(frame_table(report.failures, title="Failures"))
            msg.fail(f"{len(report.failures)} law checks failed")
            raise typer.Exit(EXIT_INTERNAL)
        msg.good(f"{len(report)} law checks, no failures")


@app.command()
def gen(
    kind: GenKind,
    seed: Optional[int] = typer.Option(None, "--seed"),
    domain_size: Optional[int] = typer.Option(None, "--domain-size"),
    variables: Optional[int] = typer.Option(None, "--variables"),
    constraints: Optional[int] = typer.Option(None, "--constraints"),
    max_arity: Optional[int] = typer.Option(None, "--max-arity"),
    planted: Optional[float] = typer.Option(
        None, "--planted", help="Chance that the instance gets a hidden solution"
    ),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
    config_file: Optional[typer.FileText] = typer.Option(None, "--config"),
) -> None:
    """Generate a random algebra or instance as JSON."""
    with exit_codes():
        config = _run_config(config_file)
        cfg = _generator(
            config, seed, domain_size, variables, constraints, max_arity, planted=planted
        )
        if kind == GenKind.Algebra:
            algebra, graph = gen_algebra(cfg)
            text = algebra_to_model(algebra, graph).json(indent=2, exclude_none=True)
        else:
            _, graph, instance = gen_problem(cfg)
            text = instance_to_model(instance, graph).json(indent=2, exclude_none=True)
        if output is not None:
            output.write_text(text)
            msg.good(f"Wrote {kind.value} to {output}")
        else:
            typer.echo(text)


@app.command()
def bench(
    sizes: List[int] = typer.Option(
        [10, 20, 40], "--sizes", help="Variable counts, repeat the option"
    ),
    repeats: int = typer.Option(3, "--repeats"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    domain_size: Optional[int] = typer.Option(None, "--domain-size"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j"),
    config_file: Optional[typer.FileText] = typer.Option(None, "--config"),
) -> None:
    """Time the solver on generated instances of growing size."""
    with exit_codes():
        config = _run_config(config_file)
        cfg = _generator(config, seed, domain_size)
        jobs = jobs if jobs is not None else get_settings().jobs
        msg.info(f"#jobs: {jobs}")
        if jobs > 1:
            msg.warn("Concurrency can affect timings")
        df = run_bench(sizes, cfg, repeats=repeats, solver_config=config.solver, jobs=jobs)
        summary = df.groupby("variables")[["seconds", "nodes", "depth"]].agg(["mean", "max"])
        summary.columns = [f"{a} {b}" for a, b in summary.columns]
        console.print(frame_table(summary, title="Bench", index=True))
