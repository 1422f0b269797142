#pragma once

#include "sigra/arrivals.hpp"
#include "sigra/auth_kdf.hpp"
#include "sigra/channel.hpp"
#include "sigra/decoder.hpp"
#include "sigra/demo.hpp"
#include "sigra/designer.hpp"
#include "sigra/frame.hpp"
#include "sigra/lte_sim.hpp"
#include "sigra/observation.hpp"
#include "sigra/report.hpp"
#include "sigra/scenario.hpp"
#include "sigra/signature.hpp"
#include "sigra/signature_sim.hpp"
#include "sigra/sweep.hpp"
