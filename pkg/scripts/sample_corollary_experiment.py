from cascademf.config import load_config
from cascademf.runner import ExperimentRunner

runner = ExperimentRunner(load_config('scripts/example_experiments.json', scenario='corollary-cw'))
runner.validate_model()
runner.sample_replicas()
runner.compute_analytic()
runner.estimate_spectra()
runner.scenario_sections()
report = runner.build_report()
runner.write(report)
