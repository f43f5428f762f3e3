from .config import ExperimentConfig, load_config
from .ingestion import AffineRescale, ExternalDataset, ingest_csv, emit_samples
from .output_writer import emit_tables, emit_surface
from .experiment_runner import run_experiment, run_replication, predict_external, sweep_target_n
