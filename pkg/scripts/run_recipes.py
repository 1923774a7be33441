"""
Скрипт для запуска всех рецептов экспериментов из docs/recipes.

Рецепт с разверткой запускается подкомандой sweep, без развертки -
подкомандой compare. Таблицы пишутся в каталог результатов.
"""

import argparse
import asyncio
import sys
from pathlib import Path

# Добавляем корневую папку проекта в путь
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from loguru import logger
from app.cli import run_cli
from app.core.exceptions import ChannelSimException
from app.services.config_service import load_experiment_config
from config.settings import settings

RECIPES_DIR = project_root / "docs" / "recipes"


async def run_recipes(out_dir: Path, trials: int = None) -> int:
    """
    Запуск всех рецептов.

    Args:
        out_dir: Каталог для CSV
        trials: Число испытаний (по умолчанию из рецептов)

    Returns:
        Число рецептов, завершившихся ошибкой
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    recipes = sorted(RECIPES_DIR.glob("*.conf"))
    logger.info(f"Найдено рецептов: {len(recipes)}")

    for recipe in recipes:
        try:
            config = load_experiment_config(recipe)
        except ChannelSimException as e:
            logger.error(f"Рецепт {recipe.name} пропущен: {e.message}")
            failures += 1
            continue

        command = "sweep" if config.sweep is not None else "compare"
        argv = [command, "--config", str(recipe), "--out", str(out_dir / f"{recipe.stem}.csv")]
        if trials:
            argv += ["--trials", str(trials)]

        logger.info(f"Рецепт {recipe.name}: {command}")
        if await run_cli(argv) != 0:
            failures += 1

    logger.info(f"Рецепты выполнены, ошибок: {failures}")
    return failures


async def main():
    """Основная функция."""
    parser = argparse.ArgumentParser(description="Запуск рецептов экспериментов")
    parser.add_argument("--out-dir", default="results", help="Каталог результатов")
    parser.add_argument("--trials", type=int, help="Число испытаний Монте-Карло")
    args = parser.parse_args()

    failures = await run_recipes(Path(args.out_dir), args.trials)
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    # Настраиваем логирование
    logger.remove()
    logger.add(
        sys.stderr,
        level=settings.LOG_LEVEL,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
    )

    asyncio.run(main())
