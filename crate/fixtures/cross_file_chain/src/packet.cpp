char outbox[64];

void stage(const char *msg) {
    strcpy(outbox, msg);
}
