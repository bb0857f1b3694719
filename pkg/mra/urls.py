from django.urls import path, include
from rest_framework.routers import DefaultRouter

from .views import ExperimentRunViewSet, RunRecordViewSet, reconstruct_view

router = DefaultRouter()
router.register(r'experiments', ExperimentRunViewSet)
router.register(r'run-records', RunRecordViewSet)

urlpatterns = [
    path('', include(router.urls)),
    path('reconstruct/', reconstruct_view, name='reconstruct'),
]
