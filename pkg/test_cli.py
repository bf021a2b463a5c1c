"""
Test Suite for the adele-lab command line
Runs main() end to end against temporary output files and checks the
exit-code contract.
"""

import io
import json
import os
import sys
import tempfile
import unittest
from unittest.mock import patch

import pandas as pd

sys.path.append(os.path.join(os.path.dirname(__file__), 'src'))

from adele_lab.cli import main

EXAMPLE_CONFIG = os.path.join(os.path.dirname(__file__), 'config', 'example_run.env')


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def read_json(self, name: str):
        with open(self.path(name), encoding='utf-8') as f:
            return json.load(f)


class TestSweeps(CliTestCase):

    def test_bressoud_sweep_passes(self):
        code = main(['--out', self.path('b.csv'), 'sweep', 'bressoud', '--q', '2', '--q', '3',
                     '--lo', '5', '--hi', '200'])
        self.assertEqual(code, 0)
        df = pd.read_csv(self.path('b.csv'))
        self.assertEqual(set(df['identity']), {'bressoud'})
        self.assertNotIn('violation', set(df['verdict']))

    def test_fib_sweep_json_summary(self):
        code = main(['--format', 'json', '--out', self.path('f.json'), 'sweep', 'fib', '--q', '2',
                     '--lo', '7', '--hi', '100'])
        self.assertEqual(code, 0)
        document = self.read_json('f.json')
        self.assertEqual(document['summary']['violation'], 0)
        skipped = [r for r in document['rows'] if r['verdict'] == 'skip']
        self.assertIn(31, [r['p'] for r in skipped])

    def test_ec_sweep_with_histogram(self):
        code = main(['--format', 'json', '--out', self.path('ec.json'), 'sweep', 'ec', '--curve=-1,1',
                     '--hi', '2000', '--hist', '10'])
        self.assertEqual(code, 0)
        document = self.read_json('ec.json')
        self.assertEqual(document['curves'][0]['bad_primes'], [2, 3, 23])
        self.assertEqual(len(document['curves'][0]['histogram']['bins']), 10)
        flags = {r['p']: r['flag'] for r in document['traces']}
        self.assertEqual(flags[23], 'bad')
        self.assertEqual(flags[29], 'ok')

    def test_ec_histogram_csv_needs_second_path(self):
        self.assertEqual(main(['--out', self.path('ec.csv'), 'sweep', 'ec', '--hist', '10']), 2)


class TestElementsAndScans(CliTestCase):

    def test_build_then_scan(self):
        element = self.path('fib1.json')
        self.assertEqual(main(['--out', element, 'element', 'build', 'fib', '--q', '1', '--lo', '7', '--hi', '300']), 0)
        self.assertEqual(self.read_json('fib1.json')['window'], {'lo': 7, 'hi': 300})
        code = main(['--format', 'json', '--out', self.path('scan.json'), 'scan', 'relation', '--in', element,
                     '--dmax', '2', '--hmax', '2'])
        self.assertEqual(code, 0)
        self.assertEqual(self.read_json('scan.json')['hits'][0]['polynomial'], 'x^2-1')

    def test_csv_element_round_trip(self):
        element = self.path('b.csv')
        self.assertEqual(main(['--format', 'csv', '--out', element, 'element', 'build', 'scriptB',
                               '--lo', '2', '--hi', '100']), 0)
        with open(element, encoding='utf-8') as f:
            self.assertEqual(f.readline(), '# window 2 100\n')
        df = pd.read_csv(element, comment='#')
        self.assertEqual(list(df.columns), ['prime', 'residue', 'flag'])
        self.assertEqual(list(df[df['flag'] == 'bad']['prime']), [2, 3])
        code = main(['--format', 'json', '--out', self.path('scan.json'), 'scan', 'relation', '--in', element,
                     '--dmax', '1', '--hmax', '1'])
        self.assertEqual(code, 0)
        self.assertEqual(self.read_json('scan.json')['window'], {'lo': 2, 'hi': 100})

    def test_missing_input_exits_two(self):
        code = main(['scan', 'relation', '--in', self.path('absent.json'), '--dmax', '1', '--hmax', '1'])
        self.assertEqual(code, 2)

    def test_malformed_input_exits_two(self):
        broken = self.path('broken.json')
        with open(broken, 'w', encoding='utf-8') as f:
            f.write('{"window": ')
        self.assertEqual(main(['scan', 'relation', '--in', broken, '--dmax', '1', '--hmax', '1']), 2)
        table = self.path('broken.csv')
        with open(table, 'w', encoding='utf-8') as f:
            f.write('prime,residue,flag\ntwo,1,ok\n')
        self.assertEqual(main(['scan', 'relation', '--in', table, '--dmax', '1', '--hmax', '1']), 2)

    def test_output_in_missing_directory_exits_two(self):
        out = os.path.join(self.tmp.name, 'no_such_dir', 'fib1.json')
        code = main(['--out', out, 'element', 'build', 'fib', '--q', '1', '--lo', '7', '--hi', '100'])
        self.assertEqual(code, 2)
        self.assertFalse(os.path.exists(out))


class TestAudits(CliTestCase):

    def test_inconsistent_audit_exits_one(self):
        code = main(['--out', self.path('af.csv'), 'audit', 'af', '--seq', 'constant', '--b', '1,2,3',
                     '--lo', '2', '--hi', '200'])
        self.assertEqual(code, 1)
        df = pd.read_csv(self.path('af.csv'))
        self.assertEqual(set(df['verdict']), {'inconsistent'})

    def test_growth_audit(self):
        code = main(['--format', 'json', '--out', self.path('g.json'), 'audit', 'growth', '--seq', 'floorlog',
                     '--dmax', '4'])
        self.assertEqual(code, 0)
        self.assertEqual(self.read_json('g.json')['verdict'], 'consistent')

    def test_domain_error_exits_two(self):
        self.assertEqual(main(['audit', 'af', '--b', '3,2', '--lo', '2', '--hi', '100']), 2)


class TestLogTools(CliTestCase):

    def test_wieferich(self):
        code = main(['--format', 'json', '--out', self.path('w.json'), 'log', 'wieferich', '--alpha', '2',
                     '--target', '0', '--hi', '4000'])
        self.assertEqual(code, 0)
        self.assertEqual([r['p'] for r in self.read_json('w.json')['rows']], [1093, 3511])

    def test_capacity_error_exits_three(self):
        self.assertEqual(main(['log', 'wieferich', '--hi', str(10 ** 8)]), 3)

    def test_disprove(self):
        code = main(['--format', 'json', '--out', self.path('d.json'), 'log', 'disprove', '--rat', '1/1',
                     '--hi', '100'])
        self.assertEqual(code, 0)
        self.assertEqual(self.read_json('d.json')['witness'], 5)

    def test_phiell(self):
        code = main(['--format', 'json', '--out', self.path('phi.json'), 'log', 'phiell', '--ell', '11'])
        self.assertEqual(code, 0)
        document = self.read_json('phi.json')
        self.assertEqual(document['value'], '2047')
        self.assertEqual([f['prime'] for f in document['factorization']], ['23', '89'])


class TestExperimentsAndConfig(CliTestCase):

    def test_smooth(self):
        code = main(['--format', 'json', '--out', self.path('s.json'), 'exp', 'smooth', '--f', '1,0',
                     '--theta', '0.5', '--n', '10'])
        self.assertEqual(code, 0)
        self.assertEqual([r['n'] for r in self.read_json('s.json')['rows']], [1, 4, 8, 9])

    def test_equidist(self):
        code = main(['--format', 'json', '--out', self.path('e.json'), 'exp', 'equidist', '--hi', '20000',
                     '--hi-frac', '1/2'])
        self.assertEqual(code, 0)
        document = self.read_json('e.json')
        self.assertEqual(document['beta'], '1/2')
        self.assertTrue(0.4 <= document['ratio'] <= 0.6)

    def test_config_dump(self):
        with patch('sys.stdout', new_callable=io.StringIO) as stdout:
            code = main(['--config', EXAMPLE_CONFIG, 'config', 'dump'])
        self.assertEqual(code, 0)
        lines = stdout.getvalue().splitlines()
        self.assertIn('window_lo=7', lines)
        self.assertIn('curves=1,0;-1,1', lines)

    def test_missing_config_exits_two(self):
        self.assertEqual(main(['--config', self.path('missing.env'), 'config', 'dump']), 2)


if __name__ == '__main__':
    unittest.main()
