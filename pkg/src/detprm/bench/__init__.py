"""Experiment harness: configs, trial runner, oracles, complexity scans and summaries."""

from detprm.bench.complexity import ComplexityRecord, complexity_scan, lattice_distinct_lengths_oracle
from detprm.bench.config import ConfigError, ExperimentConfig, OracleConfig, config_from_json, load_config
from detprm.bench.oracle import OracleResult, brute_force_cost, oracle_delta_cost
from detprm.bench.run import CSV_FIELDS, TrialRecord, read_csv, records_to_csv, run_experiment, write_csv
from detprm.bench.summary import (
    curves,
    gnuplot_blocks,
    median_sustained_n,
    per_seed_sustained_n,
    summary_csv,
    summary_table,
    sustained_n,
)
