import dataclasses
import os
import shutil
import tempfile
from unittest import TestCase

import numpy as np
import pandas as pd

from hhme import montecarlo, popgen, reference
from hhme.errors import PopulationError
from hhme.model import ErrorModel, FinitePopulation
from hhme.popgen import PopulationSpec
from hhme.tests import common_parameters as common

RTOL = 1e-9


class PopulationSpecTest(TestCase):

    def _spec(self, **overrides):
        return dataclasses.replace(common.SMALL_SPEC, **overrides)

    def test_stratum_sizes(self):
        spec = common.SMALL_SPEC
        self.assertEqual((spec.N1, spec.N2), (1500, 500))

    def test_invalid(self):
        cases = [
            dict(N=0),
            dict(W2=1.0),
            dict(W2=0.25025),
            dict(S_y1=-1.0),
            dict(rho2=1.5),
            dict(mu_x1=float('nan')),
            dict(N=4, W2=0.5),
            dict(N=10, W2=0.1),
        ]
        for overrides in cases:
            with self.assertRaises(PopulationError):
                self._spec(**overrides)

    def test_empty_nonresponse_stratum_allowed(self):
        self.assertEqual(self._spec(W2=0.0).N2, 0)


class GeneratePopulationTest(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.pop = common.small_population()
        cls.moments = popgen.population_moments(cls.pop)

    def test_sizes_and_labels(self):
        self.assertEqual((self.pop.N, self.pop.N1, self.pop.N2), (2000, 1500, 500))
        self.assertTrue(np.all(self.pop.stratum[:1500] == 1))
        self.assertTrue(np.all(self.pop.stratum[1500:] == 2))

    def test_exact_stratum_moments(self):
        spec = common.SMALL_SPEC
        for stratum, label in ((self.moments.respondents, 1),
                               (self.moments.nonrespondents, 2)):
            size, mu_x, mu_y, S_x, S_y, rho = spec.stratum(label)
            self.assertEqual(stratum.size, size)
            common.assert_rel(self, stratum.mu_x, mu_x, RTOL)
            common.assert_rel(self, stratum.mu_y, mu_y, RTOL)
            common.assert_rel(self, stratum.S_x, S_x, RTOL)
            common.assert_rel(self, stratum.S_y, S_y, RTOL)
            common.assert_rel(self, stratum.rho, rho, RTOL)

    def test_deterministic_in_seed(self):
        again = common.small_population()
        np.testing.assert_array_equal(again.x_true, self.pop.x_true)
        np.testing.assert_array_equal(again.y_true, self.pop.y_true)
        other = common.small_population(seed=12)
        self.assertFalse(np.array_equal(other.x_true, self.pop.x_true))

    def test_no_nonresponse(self):
        pop = popgen.generate_population(
            dataclasses.replace(common.SMALL_SPEC, W2=0.0), 3)
        self.assertEqual(pop.N2, 0)
        self.assertEqual(popgen.population_moments(pop).nonrespondents.size, 0)

    def test_perfect_correlation(self):
        spec = dataclasses.replace(common.SMALL_SPEC, rho1=1.0, rho2=-1.0)
        moments = popgen.population_moments(popgen.generate_population(spec, 5))
        common.assert_rel(self, moments.respondents.rho, 1.0, RTOL)
        common.assert_rel(self, moments.nonrespondents.rho, -1.0, RTOL)

    def test_constant_stratum(self):
        spec = dataclasses.replace(common.SMALL_SPEC, S_x2=0.0, S_y2=0.0)
        moments = popgen.population_moments(popgen.generate_population(spec, 5))
        self.assertEqual(moments.nonrespondents.S_y, 0.0)
        self.assertIsNone(moments.nonrespondents.rho)
        common.assert_rel(self, moments.nonrespondents.mu_y, 40.0, RTOL)

    def test_smallest_population(self):
        small = popgen.generate_population(
            PopulationSpec(N=3, W2=0.0, mu_x1=1, mu_y1=1, mu_x2=0, mu_y2=0,
                           S_x1=1, S_y1=1, S_x2=0, S_y2=0, rho1=0.5, rho2=0), 1)
        self.assertEqual(popgen.population_moments(small).N, 3)


class PopulationMomentsTest(TestCase):

    def test_to_parameters(self):
        pop = common.small_population()
        params = common.small_design(pop)
        self.assertEqual(params.N, 2000)
        self.assertEqual(params.W2, 0.25)
        self.assertEqual(params.n, 40)
        common.assert_rel(self, params.S_y2, 7.0, RTOL)
        common.assert_rel(self, params.mu_x2, 80.0, RTOL)
        # overall mean is the weighted stratum mean
        common.assert_rel(self, params.mu_y, 0.75 * 50 + 0.25 * 40, RTOL)
        montecarlo.check_consistency(pop, params, 1e-12)

    def test_infinite(self):
        pop = common.small_population()
        params = popgen.population_moments(pop).to_parameters(40, 2.0, finite=False)
        self.assertIsNone(params.N)
        self.assertTrue(params.errors.is_zero())


class SpecFromParametersTest(TestCase):

    def test_reference_design_round_trip(self):
        params = reference.reference_design()
        spec = popgen.spec_from_parameters(params)
        self.assertEqual((spec.N1, spec.N2), (5250, 1750))
        common.assert_rel(self, spec.mu_y1, (7000 * 981.29 - 1750 * 597.29) / 5250, RTOL)
        self.assertLess(abs(spec.rho1), 1.0)

        pop = popgen.generate_population(spec, 2024)
        rebuilt = popgen.population_moments(pop).to_parameters(
            params.n, params.k, params.errors)
        for name in ('mu_y', 'mu_x', 'S_y', 'S_x', 'rho', 'S_y2', 'S_x2',
                     'rho2', 'mu_y2', 'mu_x2'):
            common.assert_rel(self, getattr(rebuilt, name), getattr(params, name), 1e-8)
        montecarlo.check_consistency(pop, params, 1e-8)

    def test_requires_finite_N(self):
        with self.assertRaises(PopulationError):
            popgen.spec_from_parameters(common.survey_parameters())

    def test_requires_stratum_two_means(self):
        params = dataclasses.replace(common.survey_parameters(), N=7000)
        with self.assertRaises(PopulationError):
            popgen.spec_from_parameters(params)

    def test_without_nonresponse(self):
        params = common.simple_parameters(N=1000, S_y=2.0, rho=0.5,
                                          errors=ErrorModel())
        spec = popgen.spec_from_parameters(params)
        self.assertEqual(spec.N2, 0)
        self.assertEqual(spec.S_y1, 2.0)

    def test_overall_variance_too_small(self):
        params = dataclasses.replace(reference.reference_design(), S_y=100.0)
        with self.assertRaises(PopulationError):
            popgen.spec_from_parameters(params)


class WritePopulationCsvTest(TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_write(self):
        pop = common.small_population()
        path = os.path.join(self.tmpdir, 'population.csv')
        popgen.write_population_csv(pop, path)
        frame = pd.read_csv(path, float_precision='round_trip')
        self.assertEqual(list(frame.columns), ['x_true', 'y_true', 'stratum'])
        self.assertEqual(len(frame), 2000)
        np.testing.assert_array_equal(frame['x_true'].values, pop.x_true)
        self.assertEqual(int((frame['stratum'] == 2).sum()), 500)


class RandomSpecExactnessTest(TestCase):

    def _random_spec(self, rng):
        N = int(rng.integers(6, 400))
        N2 = int(rng.choice([0, int(rng.integers(3, N - 2))]))
        mu = rng.uniform(1.0, 1000.0, 4)
        sd = rng.uniform(0.1, 50.0, 4)
        rho = rng.uniform(-0.99, 0.99, 2)
        return PopulationSpec(
            N=N, W2=N2 / N, mu_x1=mu[0], mu_y1=mu[1], mu_x2=mu[2], mu_y2=mu[3],
            S_x1=sd[0], S_y1=sd[1], S_x2=sd[2], S_y2=sd[3],
            rho1=rho[0], rho2=rho[1])

    def test_moments_match_any_spec(self):
        rng = np.random.default_rng(77)
        for trial in range(100):
            spec = self._random_spec(rng)
            moments = popgen.population_moments(
                popgen.generate_population(spec, trial))
            strata = [(moments.respondents, 1)]
            if spec.N2:
                strata.append((moments.nonrespondents, 2))
            for stratum, label in strata:
                size, mu_x, mu_y, S_x, S_y, rho = spec.stratum(label)
                self.assertEqual(stratum.size, size)
                common.assert_rel(self, stratum.mu_x, mu_x, RTOL)
                common.assert_rel(self, stratum.mu_y, mu_y, RTOL)
                common.assert_rel(self, stratum.S_x, S_x, RTOL)
                common.assert_rel(self, stratum.S_y, S_y, RTOL)
                self.assertAlmostEqual(stratum.rho, rho, places=9)


class TwoPointMomentsTest(TestCase):

    def test_two_points(self):
        pop = FinitePopulation(x_true=[0.0, 1.0], y_true=[0.0, 1.0], stratum=[1, 1])
        overall = popgen.population_moments(pop).overall
        self.assertEqual((overall.mu_x, overall.mu_y), (0.5, 0.5))
        self.assertAlmostEqual(overall.S_x, 0.7071067811865476, places=12)
        self.assertAlmostEqual(overall.S_y, 0.7071067811865476, places=12)
        self.assertAlmostEqual(overall.rho, 1.0, places=12)
