// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "levypass/boundary.hpp"
#include "levypass/carriers.hpp"
#include "levypass/config.hpp"
#include "levypass/distributions.hpp"
#include "levypass/engine.hpp"
#include "levypass/errors.hpp"
#include "levypass/events.hpp"
#include "levypass/finite_measure.hpp"
#include "levypass/jobs.hpp"
#include "levypass/model.hpp"
#include "levypass/oracle.hpp"
#include "levypass/records.hpp"
#include "levypass/rng.hpp"
#include "levypass/stable.hpp"
#include "levypass/stats.hpp"
#include "levypass/validation.hpp"
