#!/usr/bin/env python3
"""
ITFS - Information-Theoretic Feature Selection command line interface.
Selects features from CSV or LibSVM datasets and benchmarks the selection runtime.
"""

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import load_dotenv

from benchmark import run_bench, write_bench_csv
from dataset_io import dataset_summary, load_csv, load_libsvm
from selection import (
    DENSE,
    SPARSE,
    ColumnStore,
    ConfigError,
    CriterionKind,
    DataValidationError,
    FeatureSelector,
    LocalRuntime,
    columnar_transform,
    sparse_columnar_transform,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_DATA = 3

FORMATS = ("csv", "libsvm")
UNITS = ("nats", "bits")
LIBSVM_SUFFIXES = {".libsvm", ".svm", ".svmlight", ".txt"}


@dataclass
class RunConfig:
    """Parameters of one selection run, as given on the command line."""

    input: Path | None = None
    format: str | None = None
    criterion: str = CriterionKind.MRMR.value
    ns: int = 10
    npart: int | None = None
    beta: float | None = None
    label_position: int = -1
    bins: int | None = None
    workers: int | None = None
    output: Path | None = None
    unit: str = "nats"
    seed: int = 0

    @classmethod
    def from_args(cls, args: argparse.Namespace, env_workers: int | None = None) -> "RunConfig":
        values = {name: getattr(args, name) for name in cls.__dataclass_fields__ if hasattr(args, name)}
        config = cls(**values)
        if config.workers is None:
            config.workers = env_workers
        return config

    @property
    def kind(self) -> CriterionKind:
        return CriterionKind.parse(self.criterion)

    @property
    def log_base(self) -> float:
        return 2.0 if self.unit == "bits" else math.e

    def resolved_format(self) -> str:
        if self.format:
            return self.format
        suffix = self.input.suffix.lower() if self.input else ""
        if suffix == ".csv":
            return "csv"
        if suffix in LIBSVM_SUFFIXES:
            return "libsvm"
        raise ConfigError(f"cannot infer format from '{self.input}'; pass --format")

    def validate(self) -> "RunConfig":
        kind = self.kind
        if self.ns < 1:
            raise ConfigError(f"--ns must be >= 1, got {self.ns}")
        if self.npart is not None and self.npart < 1:
            raise ConfigError(f"--npart must be >= 1, got {self.npart}")
        if self.bins is not None and self.bins < 2:
            raise ConfigError(f"--bins must be >= 2, got {self.bins}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {self.workers}")
        if self.beta is not None and kind is not CriterionKind.MIFS:
            raise ConfigError(f"--beta only applies to mifs, not {kind.value}")
        if self.unit not in UNITS:
            raise ConfigError(f"--unit must be one of {UNITS}, got '{self.unit}'")
        if self.format is not None and self.format not in FORMATS:
            raise ConfigError(f"--format must be one of {FORMATS}, got '{self.format}'")
        return self


@dataclass
class BenchConfig(RunConfig):
    """A sweep over synthetic data sizes, worker counts and thresholds."""

    m_values: list[int] = field(default_factory=lambda: [10_000, 20_000])
    n_features: int = 100
    ns_values: list[int] = field(default_factory=lambda: [10])
    workers_values: list[int] = field(default_factory=lambda: [1, 2, 4, 8])
    cardinality: int = 4
    density: float = 1.0
    layout: str = DENSE
    compare_sequential: bool = False

    def validate(self) -> "BenchConfig":
        super().validate()
        if any(m < 1 for m in self.m_values) or self.n_features < 1:
            raise ConfigError("--m-values and --n-features must be >= 1")
        if any(ns < 1 for ns in self.ns_values):
            raise ConfigError("--ns-values must be >= 1")
        if any(w < 1 for w in self.workers_values):
            raise ConfigError("--workers-values must be >= 1")
        if self.cardinality < 2:
            raise ConfigError(f"--cardinality must be >= 2, got {self.cardinality}")
        if not 0.0 < self.density <= 1.0:
            raise ConfigError(f"--density must be in (0, 1], got {self.density}")
        return self


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as configuration errors instead of exiting."""

    def error(self, message):
        raise ConfigError(message)


class ItfsCli:
    """Main CLI application for information-theoretic feature selection"""

    def __init__(self):
        load_dotenv()
        self.env_workers_raw = os.getenv('ITFS_WORKERS')
        self.logger = logging.getLogger(__name__)

    def env_workers(self) -> int | None:
        """Worker count from ITFS_WORKERS, used when --workers is not given."""
        if not self.env_workers_raw:
            return None
        try:
            workers = int(self.env_workers_raw)
        except ValueError:
            raise ConfigError(f"ITFS_WORKERS must be an integer, got '{self.env_workers_raw}'") from None
        if workers < 1:
            raise ConfigError(f"ITFS_WORKERS must be >= 1, got {workers}")
        return workers

    def load_store(self, config: RunConfig, runtime: LocalRuntime) -> ColumnStore:
        """Read the input file and build its columnar store."""
        npart = config.npart or runtime.default_row_partitions
        if config.resolved_format() == "csv":
            data = load_csv(config.input, config.label_position, config.bins)
            return columnar_transform(data, npart, runtime)
        records, labels, n_features = load_libsvm(config.input, config.bins)
        return sparse_columnar_transform(records, labels, n_features, npart, runtime)

    def select_command(self, args):
        """Select features and write one JSON record per selected feature"""
        config = RunConfig.from_args(args, self.env_workers()).validate()
        kind = config.kind
        runtime = LocalRuntime(config.workers)
        to_file = config.output is not None
        if to_file:
            print(f"🔍 Selecting {config.ns} features from: {config.input}")
            print(f"📊 Criterion: {kind.value}, Workers: {runtime.workers}, Unit: {config.unit}")

        start = time.perf_counter()
        store = self.load_store(config, runtime)
        transform_ms = (time.perf_counter() - start) * 1000.0
        self.logger.info(f"{store.layout} store ready in {transform_ms:.1f} ms")

        selector = FeatureSelector(
            store, runtime, log_base=config.log_base, progress=to_file and args.progress
        )
        result = selector.select(kind, config.ns, config.beta)
        relevance_ms = sum(selector.timings["relevance"])
        redundancy_ms = [0.0, *selector.timings["redundancy"]]

        lines = []
        for rank, (feature, score) in enumerate(result.selected, 1):
            record = {
                "rank": rank,
                "feature": feature,
                "score": score,
                "unit": config.unit,
                "criterion": kind.value,
                "ns": config.ns,
                "npart": store.npart,
                "timings_ms": {
                    "transform": round(transform_ms, 3),
                    "relevance": round(relevance_ms, 3),
                    "redundancy": round(redundancy_ms[rank - 1], 3),
                },
            }
            lines.append(json.dumps(record))

        if to_file:
            with open(config.output, 'w') as f:
                for line in lines:
                    f.write(f"{line}\n")
            print(f"✅ Selected {len(result)} features: {result.features}")
            print(f"💾 Records saved to: {config.output}")
        else:
            for line in lines:
                print(line)
        return EXIT_OK

    def bench_command(self, args):
        """Time selection on synthetic data across a sweep grid"""
        config = BenchConfig.from_args(args, self.env_workers()).validate()
        print(f"📊 Benchmarking {config.kind.value}: m={config.m_values}, "
              f"workers={config.workers_values}, ns={config.ns_values}")

        frame = run_bench(
            m_values=config.m_values,
            n=config.n_features,
            ns_values=config.ns_values,
            workers_values=config.workers_values,
            kind=config.kind,
            npart=config.npart,
            cardinality=config.cardinality,
            density=config.density,
            seed=config.seed,
            layout=config.layout,
            compare_sequential=config.compare_sequential,
            progress=args.progress,
        )
        for cell in frame.attrs["failed"]:
            print(f"❌ Cell m={cell['m']} workers={cell['workers']} ns={cell['ns']}: {cell['error']}")
        if frame.empty:
            print("❌ Every bench cell failed")
            return EXIT_CONFIG

        output = config.output or Path("bench.csv")
        write_bench_csv(frame, output)
        print(f"✅ {len(frame)} timing rows written")
        print(f"💾 Timings saved to: {output}")
        return EXIT_OK

    def inspect_command(self, args):
        """Print a summary of a dataset"""
        config = RunConfig.from_args(args, self.env_workers()).validate()
        store = self.load_store(config, LocalRuntime(config.workers))
        summary = dataset_summary(store)

        print(f"📊 Dataset: {config.input} ({summary['layout']})")
        print(f"  Instances: {summary['instances']}")
        print(f"  Features: {summary['features']}")
        print(f"  Classes: {summary['classes']}")
        print(f"  Non-zero density: {summary['density']:.2%}")
        print(f"  Cardinality range: {summary['min_cardinality']}..{summary['max_cardinality']}")
        return EXIT_OK

    def _add_input_arguments(self, parser):
        parser.add_argument('input', type=Path, help='Dataset file (CSV or LibSVM)')
        parser.add_argument('--format', choices=FORMATS, help='Input format (default: from file suffix)')
        parser.add_argument('--label-position', type=int, default=-1,
                            help='CSV class column, negative counts from the end (default: last)')
        parser.add_argument('--bins', type=int, help='Equal-width bin count for non-integer values')
        parser.add_argument('--npart', type=int, help='Column partitions (default: 2 x workers)')
        parser.add_argument('--workers', type=int, help='Worker threads (default: ITFS_WORKERS or CPU count)')

    def create_parser(self):
        """Create argument parser"""
        parser = _Parser(
            prog='itfs',
            description='ITFS - information-theoretic filter feature selection on a partitioned runtime',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  # Select 10 features with mRMR
  itfs select data.csv --criterion mrmr --ns 10 --output selected.jsonl

  # Sparse LibSVM input, scores in bits
  itfs select news20.libsvm --criterion jmi --ns 50 --unit bits

  # Sweep worker counts and thresholds
  itfs bench --m-values 100000 200000 --workers-values 1 2 4 8 --ns-values 10 25 50

  # Summarize a dataset
  itfs inspect data.csv --bins 8
            """
        )
        parser.add_argument('--verbose', '-v', action='store_true', help='Log phase progress')
        parser.add_argument('--progress', action='store_true', help='Show progress bars')

        subparsers = parser.add_subparsers(dest='command', help='Available commands')

        # Select command
        select_parser = subparsers.add_parser('select', help='Select features from a dataset')
        self._add_input_arguments(select_parser)
        select_parser.add_argument('--criterion', type=str.lower, default='mrmr',
                                   choices=[k.value for k in CriterionKind], help='Selection criterion')
        select_parser.add_argument('--ns', type=int, default=10, help='Number of features to select')
        select_parser.add_argument('--beta', type=float, help='MIFS redundancy weight (default: 1.0)')
        select_parser.add_argument('--unit', choices=UNITS, default='nats', help='Score unit')
        select_parser.add_argument('--output', type=Path, help='Write JSON-lines records to file')

        # Bench command
        bench_parser = subparsers.add_parser('bench', help='Benchmark selection on synthetic data')
        bench_parser.add_argument('--criterion', type=str.lower, default='mrmr',
                                  choices=[k.value for k in CriterionKind], help='Selection criterion')
        bench_parser.add_argument('--m-values', type=int, nargs='+', default=[10_000, 20_000],
                                  help='Instance counts to sweep')
        bench_parser.add_argument('--n-features', type=int, default=100, help='Input features')
        bench_parser.add_argument('--ns-values', type=int, nargs='+', default=[10],
                                  help='Selection thresholds to sweep')
        bench_parser.add_argument('--workers-values', type=int, nargs='+', default=[1, 2, 4, 8],
                                  help='Worker counts to sweep')
        bench_parser.add_argument('--npart', type=int, help='Column partitions (default: 2 x workers)')
        bench_parser.add_argument('--cardinality', type=int, default=4, help='Values per feature')
        bench_parser.add_argument('--density', type=float, default=1.0, help='Fraction of non-zero cells')
        bench_parser.add_argument('--layout', choices=[DENSE, SPARSE], default=DENSE,
                                  help='Columnar layout to benchmark')
        bench_parser.add_argument('--seed', type=int, default=0, help='Synthetic data seed')
        bench_parser.add_argument('--compare-sequential', action='store_true',
                                  help='Also time the sequential reference selection')
        bench_parser.add_argument('--output', type=Path, help='Timing CSV (default: bench.csv)')

        # Inspect command
        inspect_parser = subparsers.add_parser('inspect', help='Summarize a dataset')
        self._add_input_arguments(inspect_parser)

        return parser

    def run(self, args=None):
        """Main entry point"""
        parser = self.create_parser()
        try:
            parsed_args = parser.parse_args(args)
        except ConfigError as e:
            print(f"❌ {e}")
            return EXIT_CONFIG

        logging.basicConfig(
            level=logging.INFO if parsed_args.verbose else logging.WARNING,
            format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        )

        commands = {
            'select': self.select_command,
            'bench': self.bench_command,
            'inspect': self.inspect_command,
        }
        if parsed_args.command not in commands:
            parser.print_help()
            return EXIT_CONFIG

        try:
            return commands[parsed_args.command](parsed_args)
        except ConfigError as e:
            print(f"❌ Invalid configuration: {e}")
            return EXIT_CONFIG
        except DataValidationError as e:
            print(f"❌ Invalid data: {e}")
            return EXIT_DATA
        except MemoryError:
            print("❌ Invalid data: contingency tables do not fit in memory; bin high-cardinality columns")
            return EXIT_DATA
        except OSError as e:
            print(f"❌ I/O error: {e}")
            return EXIT_IO


def main():
    """Main entry point for CLI"""
    cli = ItfsCli()

    try:
        exit_code = cli.run()
        sys.exit(exit_code)
    except KeyboardInterrupt:
        print("\n❌ Operation cancelled by user")
        sys.exit(1)


if __name__ == "__main__":
    main()
