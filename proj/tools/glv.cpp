#include <cstdio>
int main() { std::puts("glv placeholder"); return 0; }
