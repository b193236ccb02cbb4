#include <cstdio>
int main(){ std::puts("cubicstring: commands pending"); return 0; }
