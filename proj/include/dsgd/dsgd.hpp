#ifndef DSGD_DSGD_HPP
#define DSGD_DSGD_HPP

#include "dsgd/approx.hpp"
#include "dsgd/cluster.hpp"
#include "dsgd/data.hpp"
#include "dsgd/driver.hpp"
#include "dsgd/io.hpp"
#include "dsgd/lbfgs.hpp"
#include "dsgd/linalg.hpp"
#include "dsgd/loss.hpp"
#include "dsgd/metrics.hpp"
#include "dsgd/reference.hpp"
#include "dsgd/search.hpp"
#include "dsgd/svrg.hpp"
#include "dsgd/synth.hpp"

#endif  // DSGD_DSGD_HPP
