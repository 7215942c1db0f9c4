"""
Núcleo de infraestrutura do fracgrid.

Subpacotes:
    - config        → defaults, overrides, deep-merge e hash de configuração
    - pipeline      → RunContext, tipos de resultado, protocolo de Step
    - engine        → planejamento determinístico e execução de Steps
    - traceability  → Manifest de execução (event log + estado de Steps)

Módulos:
    - errors        → payload canônico de erro e catálogo de tipos
    - exceptions    → exceções tipadas levantadas pelas bibliotecas numéricas

Nenhum módulo deste pacote contém lógica numérica.
"""
