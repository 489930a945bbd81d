#include "idrkit/blocks.hpp"
int main(){ return 0; }
