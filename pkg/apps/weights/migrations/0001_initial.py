# Generated by Django 5.2.3 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='WeightCacheEntry',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('created', models.DateTimeField(auto_now_add=True)),
                ('modified', models.DateTimeField(auto_now=True)),
                ('structure_hash', models.CharField(db_index=True, max_length=64)),
                ('graph', models.JSONField()),
                ('slice', models.CharField(max_length=32)),
                ('samples', models.PositiveBigIntegerField()),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('workers', models.PositiveIntegerField(default=1)),
                ('method', models.CharField(max_length=16)),
                ('value', models.FloatField()),
                ('stderr', models.FloatField()),
            ],
            options={
                'verbose_name': 'Weight cache entry',
                'verbose_name_plural': 'Weight cache entries',
                'ordering': ['created'],
                'unique_together': {('structure_hash', 'slice', 'samples', 'seed', 'workers')},
            },
        ),
    ]
