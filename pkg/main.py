# -*- coding: utf-8 -*-
"""
Interference Delay Analyzer - 主程式入口
命令列介面：執行各實驗並輸出 CSV，或對既有結果檔執行重現檢查
"""
import sys
import os
import glob
import logging
import argparse
import multiprocessing

from config import AppConfig, EXPERIMENT_KINDS, UPDATE_LOG
from errors import ConfigError, DelayAnalyzerError
from experiments import check_reproduction, run_experiment
from parsers import HAS_NATSORT, load_experiment_config, read_dataset, sort_naturally

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2


def setup_logging():
    """初始化日誌系統"""
    log_level = logging.DEBUG if os.getenv(AppConfig.DEBUG_ENV) else logging.INFO

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s',
        handlers=[
            logging.FileHandler(AppConfig.LOG_FILENAME, encoding='utf-8', mode='w'),
            logging.StreamHandler(sys.stdout)
        ]
    )
    logging.getLogger("numexpr").setLevel(logging.WARNING)
    logging.captureWarnings(True)
    logging.info(f"應用程式啟動 - {AppConfig.TITLE}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='delay-analyzer', description=AppConfig.TITLE,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument('--version', action='version', version=f"{AppConfig.TITLE}\n{UPDATE_LOG}")
    sub = parser.add_subparsers(dest='command')

    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=f'執行 {kind} 實驗')
        p.add_argument('--config', help='JSON 設定檔 (覆寫預設參數)')
        p.add_argument('--out', help=f'輸出 CSV (預設 {kind}.csv)')
        p.add_argument('--seed', type=int, default=0, help='模擬亂數種子')
        p.add_argument('--slots', type=int, help='模擬時槽數 (僅 validate)')
        p.add_argument('--threads', type=int, default=1, help='平行行程數 (1 = 不開子行程)')

    p = sub.add_parser('check', help='對結果 CSV (或資料夾) 執行重現檢查')
    p.add_argument('paths', nargs='+', help='CSV 檔或包含 CSV 的資料夾')
    return parser


def _progress(done, message):
    logging.debug(message)


def run_command(args) -> int:
    params = load_experiment_config(args.command, args.config)
    if args.slots is not None:
        if 'slots' not in params:
            raise ConfigError(f"--slots 只適用於 validate (目前: {args.command})", key='slots')
        if args.slots < 1:
            raise ConfigError("必須 >= 1", key='slots')
        params['slots'] = args.slots
    out = args.out or f"{args.command}.csv"
    dataset = run_experiment(args.command, params, seed=args.seed, threads=args.threads,
                             out=out, progress_callback=_progress)
    print(f"{args.command}: {len(dataset.frame)} 列 -> {out}")
    if dataset.errors:
        print(f"錯誤: {len(dataset.errors)} 個掃描點失敗 (status=error 列)，詳見 {AppConfig.LOG_FILENAME}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _collect_datasets(paths):
    files = []
    for path in paths:
        if os.path.isdir(path):
            files.extend(sort_naturally(glob.glob(os.path.join(path, '*.csv'))))
        else:
            files.append(path)
    return files


def check_command(args) -> int:
    files = _collect_datasets(args.paths)
    if not files:
        raise ConfigError(f"找不到任何 CSV: {args.paths}")
    all_passed = True
    for filepath in files:
        metadata, frame = read_dataset(filepath)
        report = check_reproduction(metadata, frame)
        print(f"# {filepath}")
        print(report.render())
        all_passed &= report.passed
    return EXIT_OK if all_passed else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_CONFIG_ERROR

    setup_logging()
    if not HAS_NATSORT:
        logging.warning("未安裝 natsort 套件，建議執行: pip install natsort")
    try:
        if args.command == 'check':
            return check_command(args)
        return run_command(args)
    except DelayAnalyzerError as e:
        logging.error(f"{type(e).__name__}: {e}")
        print(f"錯誤: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == '__main__':
    multiprocessing.freeze_support()
    sys.exit(main())
