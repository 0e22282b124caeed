from django.urls import include, path

urlpatterns: list = [
    path("api/", include("dqengine.api.urls")),
]
