#pragma once

#include <qpump/qops.hpp>
#include <qpump/model.hpp>
#include <qpump/observables.hpp>
#include <qpump/dynamics.hpp>
#include <qpump/protocol.hpp>
#include <qpump/sweep.hpp>
#include <qpump/validation.hpp>
#include <qpump/config.hpp>
#include <qpump/report.hpp>
