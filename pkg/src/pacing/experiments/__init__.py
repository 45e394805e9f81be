from .gap import gap_pct, run_gap_analysis
from .misreport import MisreportGrid, reported_instance, run_misreport_study
from .parallel import WORKERS_ENV, pmap, worker_count
from .report import ExperimentReport, read_csv, write_csv
from .scalability import ScaleGrid, run_scalability
from .warm_start import run_warm_start

__all__ = ["gap_pct", "run_gap_analysis", "MisreportGrid", "reported_instance",
           "run_misreport_study", "WORKERS_ENV", "pmap", "worker_count", "ExperimentReport",
           "read_csv", "write_csv", "ScaleGrid", "run_scalability", "run_warm_start"]
