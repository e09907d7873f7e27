"""
Results Writer

Writes episode results to JSONL (full records) and CSV (flat columns) side by
side, plus the batch summary JSON.
"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import structlog

logger = structlog.get_logger(__name__)


class ResultsWriter:
    """Writes batch results into a run directory"""

    COLUMNS = ['scenario_id', 'goal_kind', 'success', 'spl', 'steps', 'executed_length',
               'optimal_length', 'distance_to_target', 'detected', 'provenance', 'room', 'node',
               'collisions', 'error', 'total_s']

    def __init__(self, out_dir: Union[str, Path]):
        """
        Initialize ResultsWriter

        Args:
            out_dir: Directory to write result files
        """
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    @property
    def jsonl_path(self) -> Path:
        return self.out_dir / 'results.jsonl'

    @property
    def csv_path(self) -> Path:
        return self.out_dir / 'results.csv'

    @property
    def summary_path(self) -> Path:
        return self.out_dir / 'summary.json'

    def write_results(self, results: Sequence) -> Dict[str, Any]:
        """
        Write every result to both files, in the given order

        Returns:
            Dict with rows written and file sizes
        """
        rows_written = 0
        with open(self.csv_path, 'w', newline='', encoding='utf-8') as csv_file, \
             open(self.jsonl_path, 'w', encoding='utf-8') as jsonl_file:

            csv_writer = csv.DictWriter(csv_file, fieldnames=self.COLUMNS, extrasaction='ignore')
            csv_writer.writeheader()

            for result in results:
                csv_writer.writerow(result.to_row())
                jsonl_file.write(json.dumps(result.to_dict(), sort_keys=True) + '\n')
                rows_written += 1

        metadata = {
            'rows': rows_written,
            'csv_size_bytes': self.csv_path.stat().st_size,
            'jsonl_size_bytes': self.jsonl_path.stat().st_size,
        }
        logger.info("Results written", out_dir=str(self.out_dir), **metadata)
        return metadata

    def write_summary(self, summary: Dict[str, Any]) -> Path:
        self.summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True), encoding='utf-8')
        return self.summary_path

    def read_results(self) -> List[Dict[str, Any]]:
        """Full records back from results.jsonl (empty when missing)"""
        if not self.jsonl_path.exists():
            logger.warning("Results file not found", path=str(self.jsonl_path))
            return []
        with open(self.jsonl_path, 'r', encoding='utf-8') as f:
            return [json.loads(line) for line in f if line.strip()]
