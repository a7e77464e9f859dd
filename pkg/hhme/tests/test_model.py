import dataclasses
import os
import shutil
import tempfile
from unittest import TestCase

import numpy as np

from hhme import model, utilities
from hhme.errors import ConfigError, ParameterError, SimulationError
from hhme.model import (ErrorModel, EstimatorRecord, FinitePopulation,
                        ParameterSet, SampleRealization, ValidatedParameterSet)
from hhme.tests import common_parameters as common


class ErrorModelTest(TestCase):

    def test_defaults_are_zero(self):
        self.assertTrue(ErrorModel().is_zero())
        self.assertFalse(ErrorModel(sigma_v2_sq=1.0).is_zero())

    def test_negative_variance(self):
        with self.assertRaises(ParameterError) as context:
            ErrorModel(sigma_u_sq=-1.0)
        self.assertIn('sigma_u_sq', str(context.exception))

    def test_non_finite_variance(self):
        with self.assertRaises(ParameterError):
            ErrorModel(sigma_v_sq=float('inf'))


class ParameterSetTest(TestCase):

    def test_validate_attaches_ratio(self):
        p = common.survey_parameters()
        self.assertIsInstance(p, ValidatedParameterSet)
        self.assertEqual(p.R, 981.29 / 1755.53)

    def test_validate_is_idempotent(self):
        p = common.survey_parameters()
        self.assertIs(model.validate(p), p)

    def test_replace_revalidates(self):
        p = common.survey_parameters()
        with self.assertRaises(ParameterError):
            dataclasses.replace(p, rho=1.5)
        q = dataclasses.replace(p, mu_y=2 * p.mu_y)
        self.assertEqual(q.R, 2 * p.mu_y / p.mu_x)

    def test_invariant_names(self):
        cases = [
            (dict(rho=1.5), 'rho out of range'),
            (dict(rho2=-1.01), 'rho2 out of range'),
            (dict(W2=1.2), 'W2 out of range'),
            (dict(k=0.5), 'k must be >= 1'),
            (dict(mu_x=0.0), 'mu_x must be nonzero'),
            (dict(S_y=0.0), 'S_y must be > 0'),
            (dict(S_x2=-1.0), 'S_x2 must be >= 0'),
            (dict(n=1), 'n must be an integer >= 2'),
            (dict(N=50), 'N must be >= n'),
            (dict(N=1001, W2=0.25), 'W2*N must be integral'),
        ]
        for overrides, message in cases:
            with self.assertRaises(ParameterError) as context:
                common.simple_parameters(**overrides)
            self.assertIn(message, str(context.exception))

    def test_parameter_error_is_value_error(self):
        with self.assertRaises(ValueError):
            common.simple_parameters(rho=2.0)

    def test_sampling_fraction(self):
        self.assertIsNone(common.simple_parameters().f)
        self.assertEqual(common.simple_parameters(N=1000).f, 0.1)

    def test_without_helpers(self):
        p = common.survey_parameters()
        self.assertTrue(p.without_errors().errors.is_zero())
        self.assertEqual(p.without_errors().S_y, p.S_y)
        self.assertEqual(p.without_nonresponse().W2, 0.0)
        self.assertEqual(p.without_nonresponse().errors, p.errors)

    def test_to_dict_key_order(self):
        self.assertEqual(tuple(common.survey_parameters().to_dict()),
                         model.CONFIG_KEYS)

    def test_from_dict(self):
        p = common.survey_parameters()
        self.assertEqual(model.validate(ParameterSet.from_dict(p.to_dict())), p)

    def test_from_dict_unknown_key(self):
        mapping = common.survey_parameters().to_dict()
        mapping['sigma_w_sq'] = 1.0
        with self.assertRaises(ConfigError) as context:
            ParameterSet.from_dict(mapping)
        self.assertIn('sigma_w_sq', str(context.exception))

    def test_from_dict_missing_key(self):
        mapping = common.survey_parameters().to_dict()
        del mapping['rho2']
        with self.assertRaises(ConfigError) as context:
            ParameterSet.from_dict(mapping)
        self.assertIn('rho2', str(context.exception))

    def test_from_dict_non_numeric(self):
        mapping = common.survey_parameters().to_dict()
        mapping['S_y'] = 'large'
        with self.assertRaises(ConfigError):
            ParameterSet.from_dict(mapping)


class ConfigFileTest(TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def _path(self, name):
        return os.path.join(self.tmpdir, name)

    def test_write_read_exact(self):
        p = dataclasses.replace(common.survey_parameters(), N=7000,
                                mu_y2=597.29, mu_x2=1100.24)
        path = self._path('params.yaml')
        model.write_parameters(p, path)
        self.assertEqual(model.read_parameters(path), p)

    def test_optional_keys_may_be_omitted(self):
        mapping = common.survey_parameters().to_dict()
        for key in ('N', 'mu_y2', 'mu_x2'):
            del mapping[key]
        path = self._path('params.yaml')
        utilities.write_yaml(path, mapping)
        p = model.read_parameters(path)
        self.assertIsNone(p.N)
        self.assertIsNone(p.mu_y2)

    def test_schema_rejects_wrong_type(self):
        mapping = common.survey_parameters().to_dict()
        mapping['rho'] = 'strong'
        path = self._path('params.yaml')
        utilities.write_yaml(path, mapping)
        with self.assertRaises(ConfigError) as context:
            model.read_parameters(path)
        self.assertIn('rho', str(context.exception))

    def test_schema_rejects_unknown_key(self):
        mapping = common.survey_parameters().to_dict()
        mapping['extra'] = 1.0
        path = self._path('params.yaml')
        utilities.write_yaml(path, mapping)
        with self.assertRaises(ConfigError):
            model.read_parameters(path)

    def test_invalid_values_named(self):
        mapping = common.survey_parameters().to_dict()
        mapping['rho'] = 1.5
        path = self._path('params.yaml')
        utilities.write_yaml(path, mapping)
        with self.assertRaises(ParameterError) as context:
            model.read_parameters(path)
        self.assertIn('rho', str(context.exception))

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            model.read_parameters(self._path('absent.yaml'))


class FinitePopulationTest(TestCase):

    def test_accessors(self):
        pop = FinitePopulation(x_true=[1.0, 2.0, 3.0, 10.0],
                               y_true=[2.0, 4.0, 6.0, 20.0],
                               stratum=[1, 1, 1, 2])
        self.assertEqual((pop.N, pop.N1, pop.N2), (4, 3, 1))
        self.assertEqual(pop.W2, 0.25)
        self.assertEqual(pop.X_bar, 4.0)
        self.assertEqual(pop.Y1_bar, 4.0)
        self.assertEqual(pop.Y2_bar, 20.0)
        self.assertEqual(pop.S_y1_sq, 4.0)
        self.assertEqual(pop.S_y2_sq, 0.0)

    def test_read_only(self):
        pop = FinitePopulation(x_true=[1.0, 2.0], y_true=[1.0, 2.0], stratum=[1, 2])
        with self.assertRaises(ValueError):
            pop.x_true[0] = 5.0

    def test_invalid(self):
        with self.assertRaises(ParameterError):
            FinitePopulation(x_true=[1.0], y_true=[1.0, 2.0], stratum=[1, 1])
        with self.assertRaises(ParameterError):
            FinitePopulation(x_true=[1.0, 2.0], y_true=[1.0, 2.0], stratum=[1, 3])
        with self.assertRaises(ParameterError):
            FinitePopulation(x_true=[1.0, np.nan], y_true=[1.0, 2.0], stratum=[1, 1])
        with self.assertRaises(ParameterError):
            FinitePopulation(x_true=[1.0, 2.0], y_true=[1.0, 2.0], stratum=[2, 2])


class SampleRealizationTest(TestCase):

    def _realization(self, **overrides):
        values = dict(
            sample_idx=np.array([0, 1, 2, 3]),
            respondent_idx=np.array([0, 1]),
            nonrespondent_idx=np.array([2, 3]),
            subsample_idx=np.array([2]),
            y_obs_resp=np.array([1.0, 3.0]), x_obs_resp=np.array([2.0, 4.0]),
            y_obs_sub=np.array([10.0]), x_obs_sub=np.array([20.0]))
        values.update(overrides)
        return SampleRealization(**values)

    def test_accessors(self):
        sample = self._realization()
        self.assertEqual((sample.n, sample.n1, sample.n2, sample.r), (4, 2, 2, 1))
        self.assertEqual(sample.w2, 0.5)
        self.assertEqual(sample.y1_bar, 2.0)
        self.assertEqual(sample.x2r_bar, 20.0)

    def test_subsample_outside_nonrespondents(self):
        with self.assertRaises(ParameterError):
            self._realization(subsample_idx=np.array([1]))

    def test_empty_subsample_with_nonrespondents(self):
        with self.assertRaises(ParameterError):
            self._realization(subsample_idx=np.array([], dtype=int),
                              y_obs_sub=np.array([]), x_obs_sub=np.array([]))

    def test_observation_counts(self):
        with self.assertRaises(ParameterError):
            self._realization(y_obs_resp=np.array([1.0]))


class EstimatorRecordTest(TestCase):

    def test_mse_below_squared_bias(self):
        with self.assertRaises(SimulationError):
            EstimatorRecord(count=10, empirical_mean=1.0, empirical_bias=2.0,
                            empirical_mse=1.0, theoretical_mse=1.0,
                            rel_deviation=0.0, se_bias=0.1, se_mse=0.1)

    def test_as_dict(self):
        record = EstimatorRecord(count=10, empirical_mean=1.0, empirical_bias=1.0,
                                 empirical_mse=2.0, theoretical_mse=2.0,
                                 rel_deviation=0.0, se_bias=0.1, se_mse=0.1)
        self.assertEqual(record.as_dict()['count'], 10)
