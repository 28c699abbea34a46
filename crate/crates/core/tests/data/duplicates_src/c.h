int proto(int x);
int counter;
