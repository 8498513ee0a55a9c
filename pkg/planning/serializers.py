from rest_framework import serializers

from .costs import BUILTIN_VARIANTS
from .search import MODE_CHOICES

COST_TABLE_CHOICES = list(BUILTIN_VARIANTS) + ['precomputed']


class PlanOptionsSerializer(serializers.Serializer):
    cost_table = serializers.ChoiceField(choices=COST_TABLE_CHOICES, required=False)
    w_n = serializers.FloatField(min_value=0.0, required=False)
    w_kappa = serializers.FloatField(min_value=0.0, required=False)
    mode = serializers.ChoiceField(choices=MODE_CHOICES, required=False)
    kappa_accumulation = serializers.ChoiceField(choices=['accumulated', 'literal'], required=False)
    prune_dead_cells = serializers.BooleanField(required=False)
    initial_heading = serializers.IntegerField(min_value=0, max_value=5, required=False, allow_null=True)
    trace = serializers.BooleanField(required=False)


class PlanRequestSerializer(serializers.Serializer):
    map = serializers.DictField()
    options = PlanOptionsSerializer(required=False)
