# /run.py
# Punto de entrada de la línea de órdenes.

from strongconverse.cli import create_cli

cli = create_cli()

if __name__ == '__main__':
    # Ejemplo: python run.py exponent --channel depolarizing:0.25 --rate 1.5
    cli(obj={})
