#include "pointgwr/gwr.hpp"

namespace pointgwr {

template class GwrNetwork<double>;
template class GwrNetwork<float>;

}  // namespace pointgwr
