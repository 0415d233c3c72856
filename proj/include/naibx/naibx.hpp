#pragma once

#include <naibx/baselines.hpp>
#include <naibx/cascade.hpp>
#include <naibx/dataio.hpp>
#include <naibx/error.hpp>
#include <naibx/labels.hpp>
#include <naibx/likelihood.hpp>
#include <naibx/metrics.hpp>
#include <naibx/model.hpp>
#include <naibx/model_io.hpp>
#include <naibx/oracle.hpp>
#include <naibx/stats.hpp>
#include <naibx/textmodel.hpp>
