#pragma once

#include "plap/blowup.hpp"
#include "plap/campaign.hpp"
#include "plap/config.hpp"
#include "plap/csv.hpp"
#include "plap/error.hpp"
#include "plap/field.hpp"
#include "plap/grid_pde.hpp"
#include "plap/indicial.hpp"
#include "plap/ode.hpp"
#include "plap/params.hpp"
#include "plap/profile.hpp"
#include "plap/radial_ode.hpp"
#include "plap/report.hpp"
