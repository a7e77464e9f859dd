import dataclasses
import math
import os
import shutil
import tempfile
from unittest import TestCase

import pandas as pd

from hhme import ingest, popgen
from hhme.errors import IngestError
from hhme.model import ErrorModel
from hhme.tests import common_parameters as common

HEADER = 'y_true,x_true,y_meas,x_meas,stratum\n'

THREE_ROWS = (HEADER +
              '10,5,11,5.5,1\n'
              '20,9,19,8.5,1\n'
              '30,16,31,16.5,2\n')


class IngestTestCase(TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def write(self, text, name='data.csv'):
        path = os.path.join(self.tmpdir, name)
        with open(path, 'w') as f:
            f.write(text)
        return path


class LoadDatasetTest(IngestTestCase):

    def test_three_rows(self):
        data = ingest.load_dataset(self.write(THREE_ROWS))
        self.assertEqual(len(data), 3)
        self.assertEqual(len(data.rows(2)), 1)
        self.assertEqual(list(data.frame.columns), list(ingest.COLUMNS))

    def test_extra_columns_ignored(self):
        text = ('household,stratum,x_meas,y_meas,x_true,y_true\n'
                'h1,1,5.5,11,5,10\n'
                'h2,1,8.5,19,9,20\n'
                'h3,2,16.5,31,16,30\n')
        data = ingest.load_dataset(self.write(text))
        self.assertEqual(list(data.frame['x_meas']), [5.5, 8.5, 16.5])
        self.assertEqual(list(data.frame.columns), list(ingest.COLUMNS))

    def test_too_few_rows(self):
        text = HEADER + '10,5,11,5.5,1\n20,9,19,8.5,1\n'
        with self.assertRaises(IngestError):
            ingest.load_dataset(self.write(text))

    def test_missing_column(self):
        text = 'y_true,x_true,y_meas,x_meas\n1,2,3,4\n'
        with self.assertRaises(IngestError) as context:
            ingest.load_dataset(self.write(text))
        self.assertIn('missing column(s): stratum', str(context.exception))

    def test_non_numeric_cell(self):
        text = HEADER + '10,5,11,5.5,1\n20,9,19,abc,1\n30,16,31,16.5,2\n'
        with self.assertRaises(IngestError) as context:
            ingest.load_dataset(self.write(text))
        self.assertIn("non-numeric value 'abc' at row 2, column x_meas",
                      str(context.exception))

    def test_empty_cell(self):
        text = HEADER + '10,5,11,5.5,1\n20,,19,8.5,1\n30,16,31,16.5,2\n'
        with self.assertRaises(IngestError) as context:
            ingest.load_dataset(self.write(text))
        self.assertIn('column x_true', str(context.exception))

    def test_bad_stratum(self):
        text = HEADER + '10,5,11,5.5,1\n20,9,19,8.5,1\n30,16,31,16.5,3\n'
        with self.assertRaises(IngestError) as context:
            ingest.load_dataset(self.write(text))
        self.assertIn('row 3', str(context.exception))

    def test_missing_file(self):
        with self.assertRaises(IngestError):
            ingest.load_dataset(os.path.join(self.tmpdir, 'absent.csv'))


class EstimateParametersTest(IngestTestCase):

    def test_three_rows(self):
        data = ingest.load_dataset(self.write(THREE_ROWS))
        with self.assertLogs('hhme', 'WARNING') as logs:
            params = ingest.estimate_parameters(data, k=2.0)
        self.assertIn('taken from stratum 1', '\n'.join(logs.output))
        self.assertEqual(params.n, 3)
        self.assertEqual(params.W2, 1.0 / 3.0)
        self.assertIsNone(params.N)
        self.assertEqual(params.mu_y, 20.0)
        self.assertEqual(params.S_y, 10.0)
        self.assertEqual(params.mu_y2, 30.0)
        self.assertEqual(params.S_y2, 0.0)
        self.assertEqual(params.errors, ErrorModel(2.0, 0.5, 2.0, 0.5))

    def test_default_k_warns(self):
        data = ingest.load_dataset(self.write(THREE_ROWS))
        with self.assertLogs('hhme', 'WARNING') as logs:
            params = ingest.estimate_parameters(data)
        self.assertEqual(params.k, 2.0)
        self.assertIn('k is not recoverable', '\n'.join(logs.output))

    def test_W2_override(self):
        data = ingest.load_dataset(self.write(THREE_ROWS))
        params = ingest.estimate_parameters(data, k=3.0, W2_override=0.5)
        self.assertEqual(params.W2, 0.5)
        self.assertEqual(params.k, 3.0)

    def test_W2_override_needs_nonrespondents(self):
        text = HEADER + '10,5,11,5.5,1\n20,9,19,8.5,1\n30,16,31,16.5,1\n'
        data = ingest.load_dataset(self.write(text))
        with self.assertRaises(IngestError):
            ingest.estimate_parameters(data, k=2.0, W2_override=0.2)
        params = ingest.estimate_parameters(data, k=2.0)
        self.assertEqual(params.W2, 0.0)
        self.assertIsNone(params.mu_y2)

    def test_error_variance_above_observed(self):
        text = HEADER + '1,1,4,1,1\n2,2,3,2,1\n3,4,2,4,1\n4,8,1,8,1\n'
        data = ingest.load_dataset(self.write(text))
        with self.assertRaises(IngestError) as context:
            ingest.estimate_parameters(data, k=2.0)
        self.assertIn('error variance exceeds observed variance for y (overall)',
                      str(context.exception))

    def test_stratum_one_too_small(self):
        text = HEADER + '10,5,10,5,1\n20,9,20,9,2\n30,16,30,16,2\n'
        data = ingest.load_dataset(self.write(text))
        with self.assertRaises(IngestError):
            ingest.estimate_parameters(data, k=2.0)


class IndirectVariancesTest(IngestTestCase):

    def test_groups(self):
        text = (HEADER + '10,5,11,5.5,1\n20,9,19,8.5,1\n'
                '30,16,31,16.5,2\n40,20,40,21,2\n')
        table = ingest.indirect_variances(ingest.load_dataset(self.write(text)))
        self.assertEqual(list(table['group']),
                         ['overall', 'overall', 'nonresponse', 'nonresponse'])
        self.assertEqual(list(table['variable']), ['y', 'x', 'y', 'x'])
        self.assertTrue(table['positive'].all())

    def test_single_nonrespondent_not_grouped(self):
        table = ingest.indirect_variances(ingest.load_dataset(self.write(THREE_ROWS)))
        self.assertEqual(set(table['group']), {'overall'})


class PopulationRoundTripTest(TestCase):

    @classmethod
    def setUpClass(cls):
        spec = dataclasses.replace(common.SMALL_SPEC, N=10000)
        cls.pop = popgen.generate_population(spec, 31)
        cls.data = ingest.dataset_from_population(
            cls.pop, ErrorModel(36.0, 36.0, 36.0, 36.0), seed=8)

    def test_no_errors(self):
        data = ingest.dataset_from_population(self.pop, ErrorModel(), seed=8)
        params = ingest.estimate_parameters(data, k=2.0)
        self.assertTrue(params.errors.is_zero())

    def test_moments_and_errors(self):
        params = ingest.estimate_parameters(self.data, k=2.0)
        self.assertEqual(params.n, 10000)
        self.assertEqual(params.W2, 0.25)
        common.assert_rel(self, params.mu_y, self.pop.Y_bar, 1e-12)
        common.assert_rel(self, params.mu_y2, self.pop.Y2_bar, 1e-12)
        common.assert_rel(self, params.S_y2, math.sqrt(self.pop.S_y2_sq), 1e-9)
        # sd of a sample variance is sigma^2 * sqrt(2 / (n_h - 1))
        rows = {1: len(self.data.rows(1)), 2: len(self.data.rows(2))}
        strata = {'sigma_u_sq': 1, 'sigma_v_sq': 1,
                  'sigma_u2_sq': 2, 'sigma_v2_sq': 2}
        for name, value in params.errors.as_dict().items():
            se = 36.0 * math.sqrt(2.0 / (rows[strata[name]] - 1))
            self.assertLess(abs(value - 36.0), 5 * se, name)

    def test_indirect_close_to_direct(self):
        table = ingest.indirect_variances(self.data)
        self.assertEqual(len(table), 4)
        for _, row in table.iterrows():
            self.assertLess(abs(row['indirect'] / row['direct'] - 1.0), 0.15,
                            '{} {}'.format(row['group'], row['variable']))

    def test_frame(self):
        self.assertIsInstance(self.data.frame, pd.DataFrame)
        self.assertEqual(len(self.data.rows(2)), 2500)
