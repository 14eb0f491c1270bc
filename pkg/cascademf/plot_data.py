# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Plot data is responsible for turning a ComparisonReport into CSV curves plus a JSON manifest"""
import csv
import io
import json
import logging

import numpy as np

from cascademf.utils import artifact_writer

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.json'


def format_cell(value):
    """Stable text for one CSV cell"""
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_bytes(header, rows):
    stream = io.StringIO()
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(value) for value in row])
    return stream.getvalue().encode('utf-8')


class PlotDataWriter:
    """This class writes every curve of a report as its own CSV file

    Each file is registered in the manifest with its role and axes, in the order it was written, so two
    identical reports produce identical file sets byte for byte.
    """

    def __init__(self, report, writer):
        self.report = report
        self.writer = writer
        self.manifest = []

    def run(self):
        """Write all curves, then the manifest; returns the manifest entries"""
        report = self.report
        self._emit('analytic_tau.csv', 'analytic tau', ['q', 'tau', 'tau_prime', 'in_J'], report.analytic_curve)
        self._emit('legendre_analytic.csv', 'analytic Legendre transform', ['h', 'tau_star'],
                   report.legendre['analytic'])
        self._emit('legendre_parametric.csv', 'parametric Legendre transform', ['h', 'tau_star'],
                   report.legendre['parametric'])

        for order, rows in sorted(report.empirical_curves.items()):
            self._emit('empirical_tau_m%d.csv' % order, 'empirical tau (m=%d)' % order,
                       ['q', 't_hat', 'stderr', 'n_levels'], rows)
        for order, rows in sorted(report.legendre['empirical'].items()):
            self._emit('legendre_empirical_m%d.csv' % order, 'empirical Legendre transform (m=%d)' % order,
                       ['h', 'tau_star'], rows)

        if report.coarse:
            self._emit('coarse_spectrum.csv', 'coarse spectrum', ['h', 'D_hat', 'count'], report.coarse['rows'])
        for q, rows in sorted(report.mu_q_samples.items()):
            self._emit('mu_q_%s.csv' % q, 'mu_q weights (q=%s)' % q, ['addr', 'weight'], rows)
        for entry in report.sections.get('orders', []):
            self._emit('corollary_m%d.csv' % entry['m'], 'perturbed tau (m=%d)' % entry['m'],
                       ['q', 't_hat', 'stderr', 'predicted'], entry['rows'])

        payload = json.dumps({'files': self.manifest}, sort_keys=True, indent=2) + '\n'
        self.writer.write(MANIFEST_NAME, payload.encode('utf-8'))
        LOGGER.info("Wrote %d plot data files", len(self.manifest))
        return self.manifest

    def _emit(self, name, role, axes, rows):
        self.writer.write(name, csv_bytes(axes, rows))
        self.manifest.append({'file': name, 'role': role, 'axes': list(axes)})


def emit_plot_data(report, destination):
    """Write the plot data of `report` to a directory, an s3:// URI or an existing writer"""
    writer = artifact_writer(destination) if isinstance(destination, str) else destination
    return PlotDataWriter(report, writer).run()
