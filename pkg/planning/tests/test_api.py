import tempfile
import uuid
from unittest.mock import patch

from django.contrib.auth.models import User
from django.core.cache import cache
from django.test import TestCase
from rest_framework import status
from rest_framework.test import APIClient

from planning.maps import serialize_map, shipped_map
from planning.models import PlanRun, ScenarioReport
from planning.tasks import run_plan_task, run_scenario_task
from planning.tests.test_workbench import MINIMAL_MAP, enclosed_map


class PlanningAPITestCase(TestCase):
    def setUp(self):
        cache.clear()
        self.user = User.objects.create_user(username='alice', password='testpass123')
        self.client = APIClient()
        self.client.force_authenticate(user=self.user)


class PlanEndpointTests(PlanningAPITestCase):
    @patch('planning.views.run_plan_task.delay')
    def test_create_plan_queues_a_run(self, delay):
        response = self.client.post('/api/plans/', {'map': MINIMAL_MAP, 'options': {'w_kappa': 2.0}}, format='json')
        self.assertEqual(response.status_code, status.HTTP_202_ACCEPTED)
        self.assertEqual(response.data['status'], 'pending')
        run = PlanRun.objects.get(id=response.data['id'])
        self.assertEqual(run.created_by, self.user)
        self.assertEqual(run.options, {'w_kappa': 2.0})
        delay.assert_called_once_with(str(run.id))

    @patch('planning.views.run_plan_task.delay')
    def test_invalid_map_names_the_field(self, delay):
        document = {**MINIMAL_MAP, 'start': [2, 2]}
        response = self.client.post('/api/plans/', {'map': document}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('start', response.data['fields'])
        delay.assert_not_called()

    def test_invalid_options(self):
        response = self.client.post(
            '/api/plans/', {'map': MINIMAL_MAP, 'options': {'cost_table': 'smoothest'}}, format='json',
        )
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('options', response.data['fields'])

    @patch('planning.views.run_plan_task.delay')
    def test_paper_mode_is_accepted(self, delay):
        response = self.client.post('/api/plans/', {'map': MINIMAL_MAP, 'options': {'mode': 'paper'}}, format='json')
        self.assertEqual(response.status_code, status.HTTP_202_ACCEPTED)
        self.assertEqual(PlanRun.objects.get(id=response.data['id']).options, {'mode': 'paper'})

    def test_authentication_required(self):
        response = APIClient().post('/api/plans/', {'map': MINIMAL_MAP}, format='json')
        self.assertIn(response.status_code, (status.HTTP_401_UNAUTHORIZED, status.HTTP_403_FORBIDDEN))

    def test_unknown_run(self):
        response = self.client.get(f"/api/plans/{uuid.uuid4()}/")
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    def test_task_runs_the_plan(self):
        run = PlanRun.objects.create(
            map_document=serialize_map(shipped_map('straight_corridor')), options={}, created_by=self.user,
        )
        result = run_plan_task(str(run.id))
        run.refresh_from_db()
        self.assertEqual(result['status'], 'ok')
        self.assertEqual(run.status, 'ok')
        self.assertIsNotNone(run.completed_at)
        self.assertEqual(run.result['metrics']['grid_cells'], 8)

        response = self.client.get(f"/api/plans/{run.id}/")
        self.assertEqual(response.data['status'], 'ok')
        self.assertEqual(len(response.data['result']['smoothed']['segments']), 1)

        response = self.client.get(f"/api/plans/{run.id}/render/?orientation=flat")
        self.assertEqual(response['Content-Type'], 'image/svg+xml')
        self.assertIn(b'smoothed', response.content)

    def test_task_records_no_path(self):
        run = PlanRun.objects.create(map_document=serialize_map(enclosed_map()), options={'trace': True})
        run_plan_task(str(run.id))
        run.refresh_from_db()
        self.assertEqual(run.status, 'no_path')
        self.assertTrue(run.error_message)

    def test_task_records_bad_map(self):
        run = PlanRun.objects.create(map_document={'bounds': {}}, options={})
        run_plan_task(str(run.id))
        run.refresh_from_db()
        self.assertEqual(run.status, 'failed')

    def test_render_pending_run_shows_the_map(self):
        run = PlanRun.objects.create(map_document=MINIMAL_MAP, options={}, created_by=self.user)
        response = self.client.get(f"/api/plans/{run.id}/render/")
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertIn(b'polygon', response.content)
        response = self.client.get(f"/api/plans/{run.id}/render/?orientation=sideways")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)


class CostTableEndpointTests(PlanningAPITestCase):
    def test_builtin_table(self):
        response = self.client.get('/api/cost-tables/adapted_ribbon/')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['costs']['6'], 0.0)
        self.assertEqual(response.data['costs']['9'], 0.915)

    def test_unknown_table(self):
        response = self.client.get('/api/cost-tables/smoothest/')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)


class OwnershipTests(PlanningAPITestCase):
    def setUp(self):
        super().setUp()
        self.other = User.objects.create_user(username='bob', password='testpass123')

    def test_runs_of_other_users_are_not_found(self):
        run = PlanRun.objects.create(map_document=MINIMAL_MAP, options={}, created_by=self.other)
        self.assertEqual(self.client.get(f"/api/plans/{run.id}/").status_code, status.HTTP_404_NOT_FOUND)
        self.assertEqual(self.client.get(f"/api/plans/{run.id}/render/").status_code, status.HTTP_404_NOT_FOUND)

        owner = APIClient()
        owner.force_authenticate(user=self.other)
        self.assertEqual(owner.get(f"/api/plans/{run.id}/").status_code, status.HTTP_200_OK)

    def test_reports_of_other_users_are_not_found(self):
        record = ScenarioReport.objects.create(name='e2_blocked_detour', created_by=self.other)
        response = self.client.get(f"/api/scenarios/{record.id}/")
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    @patch('planning.views.run_plan_task.delay')
    def test_created_run_is_visible_to_its_owner(self, delay):
        response = self.client.post('/api/plans/', {'map': MINIMAL_MAP}, format='json')
        run_id = response.data['id']
        self.assertEqual(self.client.get(f"/api/plans/{run_id}/").status_code, status.HTTP_200_OK)
        other = APIClient()
        other.force_authenticate(user=self.other)
        self.assertEqual(other.get(f"/api/plans/{run_id}/").status_code, status.HTTP_404_NOT_FOUND)


class ScenarioEndpointTests(PlanningAPITestCase):
    @patch('planning.views.run_scenario_task.delay')
    def test_create_scenario(self, delay):
        response = self.client.post('/api/scenarios/e2_blocked_detour/')
        self.assertEqual(response.status_code, status.HTTP_202_ACCEPTED)
        record = ScenarioReport.objects.get(id=response.data['id'])
        self.assertEqual(record.name, 'e2_blocked_detour')
        delay.assert_called_once_with(str(record.id))

    def test_unknown_scenario(self):
        response = self.client.post('/api/scenarios/e9/')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('name', response.data['fields'])

    def test_task_runs_the_scenario(self):
        record = ScenarioReport.objects.create(name='e2_blocked_detour', created_by=self.user)
        with self.settings(PLANNER={'OUTPUT_DIR': self._tmp_dir()}):
            run_scenario_task(str(record.id))
        record.refresh_from_db()
        self.assertIn(record.status, ('passed', 'failed_checks'))
        self.assertTrue(record.checks['pruning_saves_expansions'])

        response = self.client.get(f"/api/scenarios/{record.id}/")
        self.assertEqual(response.data['name'], 'e2_blocked_detour')
        self.assertEqual(response.data['checks'], record.checks)

    def _tmp_dir(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        return tmp.name
